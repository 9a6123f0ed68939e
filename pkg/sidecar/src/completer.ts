/**
 * Seeded completion synthesizer behind the /v1/complete contract. Each
 * choice text is a deterministic function of (server seed, request seed,
 * prompt, choice index) and is truncated at the earliest stop marker
 * before it leaves the server. Temperature is accepted for wire
 * compatibility but ignored: synthesis here is already deterministic.
 */
import { rngFor } from './hashing.js';

const WORDS = [
  'value', 'count', 'index', 'buffer', 'node', 'item', 'total', 'flag',
  'return', 'int', '=', '+', '-', '(', ')', ';', '\n',
];

export interface CompleterConfig {
  seed: number;
  modelId: string;
}

export interface CompleteParams {
  prompt: string;
  n: number;
  seed?: number;
  stop?: string[];
  maxTokens?: number;
}

export interface Choice {
  text: string;
  score: number;
}

export interface CompleteResult {
  choices: Choice[];
  model: string;
}

/** Cut `text` at the earliest occurrence of any stop marker. */
export function truncateAtStop(text: string, stop: string[]): string {
  let cut = text.length;
  for (const marker of stop) {
    if (!marker) continue;
    const idx = text.indexOf(marker);
    if (idx !== -1 && idx < cut) {
      cut = idx;
    }
  }
  return text.slice(0, cut);
}

export class SeededCompleter {
  private seed: number;
  private modelId: string;

  constructor(config: CompleterConfig) {
    this.seed = config.seed;
    this.modelId = config.modelId;
  }

  complete(params: CompleteParams): CompleteResult {
    const stop = params.stop ?? [];
    const cap = Math.min(14, params.maxTokens ?? 14);
    const choices: Choice[] = [];
    for (let i = 0; i < params.n; i++) {
      const rng = rngFor([this.seed, params.seed ?? 0, params.prompt, i]);
      const count = rng.nextInt(Math.min(4, cap), cap);
      const words: string[] = [];
      for (let k = 0; k < count; k++) {
        words.push(WORDS[rng.nextInt(0, WORDS.length - 1)]);
      }
      choices.push({
        text: truncateAtStop(words.join(' '), stop),
        score: rng.nextFloat(),
      });
    }
    return { choices, model: this.modelId };
  }
}
