/**
 * Deterministic stand-in for a pretrained encoder. Every distinct token
 * text maps to a fixed unit-norm vector drawn from a seeded gaussian
 * stream, so clients get stable, shape-correct embeddings without any
 * model weights on disk. Swap this class out to serve a real model; the
 * wire contract in server.ts does not change.
 */
import { rngFor } from './hashing.js';

export interface EmbedderConfig {
  dim: number;
  seed: number;
}

export interface EmbedResult {
  dim: number;
  cls: number[];
  vectors: number[][];
}

export class HashedEmbedder {
  private dim: number;
  private seed: number;

  constructor(config: EmbedderConfig) {
    this.dim = config.dim;
    this.seed = config.seed;
  }

  /** Unit-norm vector for one token text. */
  vector(text: string): number[] {
    const rng = rngFor([this.seed, text]);
    const v = new Array<number>(this.dim);
    let sq = 0;
    for (let i = 0; i < this.dim; i++) {
      v[i] = rng.nextGaussian();
      sq += v[i] * v[i];
    }
    const norm = Math.sqrt(sq) || 1;
    for (let i = 0; i < this.dim; i++) {
      v[i] /= norm;
    }
    return v;
  }

  embedTokens(tokens: string[]): EmbedResult {
    return {
      dim: this.dim,
      cls: this.vector('<cls>'),
      vectors: tokens.map((t) => this.vector(t)),
    };
  }

  /** Text form: whitespace positions stand in for model tokenization. */
  embedText(text: string): EmbedResult {
    const tokens = text.split(/\s+/).filter((t) => t.length > 0);
    return this.embedTokens(tokens);
  }
}
