/**
 * HTTP surface for the embedding/completion service.
 *
 * Routes: POST /v1/embed, POST /v1/complete, GET /healthz. Malformed
 * requests get 400, unknown routes 404, and the two model routes answer
 * 503 until warmup finishes. Handlers are stateless per request so
 * callers can retry idempotently.
 */
import * as http from 'node:http';
import type { AddressInfo } from 'node:net';
import { HashedEmbedder } from './embedder.js';
import { SeededCompleter } from './completer.js';
import { completeRequestSchema, embedRequestSchema, firstIssue } from './schemas.js';
import type { SidecarConfig } from './config.js';

const MAX_BODY_BYTES = 32 * 1024 * 1024;

export class SidecarServer {
  private config: SidecarConfig;
  private embedder: HashedEmbedder;
  private completer: SeededCompleter;
  private server: http.Server | null = null;
  private ready = false;
  private warmup: () => Promise<void>;
  private readyPromise: Promise<void> = Promise.resolve();

  constructor(config: SidecarConfig, warmup?: () => Promise<void>) {
    this.config = config;
    this.embedder = new HashedEmbedder({ dim: config.dim, seed: config.seed });
    this.completer = new SeededCompleter({ seed: config.seed, modelId: config.modelId });
    this.warmup = warmup ?? (async () => {});
  }

  /** Bind and start serving; resolves with the actual port. */
  async start(): Promise<number> {
    const server = http.createServer((req, res) => this.route(req, res));
    this.server = server;
    await new Promise<void>((resolve, reject) => {
      server.once('error', reject);
      server.listen(this.config.port, this.config.host, () => resolve());
    });
    this.readyPromise = this.warmup().then(() => {
      this.ready = true;
    });
    // surface warmup failures in the log, but keep serving 503s
    this.readyPromise.catch((err) => console.error('warmup failed:', err));
    return (server.address() as AddressInfo).port;
  }

  /** Resolves once warmup is done and the model routes answer 200. */
  whenReady(): Promise<void> {
    return this.readyPromise;
  }

  async stop(): Promise<void> {
    const server = this.server;
    if (!server) return;
    this.server = null;
    await new Promise<void>((resolve, reject) => {
      server.close((err) => (err ? reject(err) : resolve()));
      server.closeAllConnections();
    });
  }

  private route(req: http.IncomingMessage, res: http.ServerResponse): void {
    const method = req.method ?? 'GET';
    const url = (req.url ?? '/').split('?')[0];
    if (method === 'GET' && url === '/healthz') {
      this.json(res, 200, {
        status: this.ready ? 'ok' : 'loading',
        service: 'model-sidecar',
        model: this.config.modelId,
      });
      return;
    }
    if (method === 'POST' && (url === '/v1/embed' || url === '/v1/complete')) {
      if (!this.ready) {
        this.json(res, 503, { error: 'model is loading' });
        return;
      }
      this.readBody(req)
        .then((raw) => this.dispatch(url, raw, res))
        .catch((err) => {
          this.json(res, 400, { error: String(err instanceof Error ? err.message : err) });
        });
      return;
    }
    this.json(res, 404, { error: 'not found' });
  }

  private dispatch(url: string, raw: string, res: http.ServerResponse): void {
    let payload: unknown;
    try {
      payload = JSON.parse(raw);
    } catch {
      this.json(res, 400, { error: 'request body is not valid JSON' });
      return;
    }
    try {
      if (url === '/v1/embed') {
        this.handleEmbed(payload, res);
      } else {
        this.handleComplete(payload, res);
      }
    } catch (err) {
      console.error('handler error:', err);
      this.json(res, 500, { error: 'internal error' });
    }
  }

  private handleEmbed(payload: unknown, res: http.ServerResponse): void {
    const parsed = embedRequestSchema.safeParse(payload);
    if (!parsed.success) {
      this.json(res, 400, { error: 'need tokens (list of strings) or text (string)' });
      return;
    }
    const body = 'tokens' in parsed.data
      ? this.embedder.embedTokens(parsed.data.tokens)
      : this.embedder.embedText(parsed.data.text);
    this.json(res, 200, body);
  }

  private handleComplete(payload: unknown, res: http.ServerResponse): void {
    const parsed = completeRequestSchema.safeParse(payload);
    if (!parsed.success) {
      this.json(res, 400, { error: firstIssue(parsed.error) });
      return;
    }
    const r = parsed.data;
    const body = this.completer.complete({
      prompt: r.prompt,
      n: r.n,
      seed: r.seed,
      stop: r.stop,
      maxTokens: r.max_tokens,
    });
    this.json(res, 200, body);
  }

  private readBody(req: http.IncomingMessage): Promise<string> {
    return new Promise((resolve, reject) => {
      const chunks: Buffer[] = [];
      let size = 0;
      req.on('data', (chunk: Buffer) => {
        size += chunk.length;
        if (size > MAX_BODY_BYTES) {
          reject(new Error('request body too large'));
          req.destroy();
          return;
        }
        chunks.push(chunk);
      });
      req.on('end', () => resolve(Buffer.concat(chunks).toString('utf8')));
      req.on('error', reject);
    });
  }

  private json(res: http.ServerResponse, status: number, body: unknown): void {
    const data = Buffer.from(JSON.stringify(body), 'utf8');
    res.writeHead(status, {
      'Content-Type': 'application/json',
      'Content-Length': data.length,
    });
    res.end(data);
  }
}
