import { describe, expect, it } from 'vitest';
import { SeededCompleter, truncateAtStop } from '../src/completer.js';

const completer = new SeededCompleter({ seed: 3, modelId: 'test-model' });

describe('truncateAtStop', () => {
  it('cuts at the marker', () => {
    expect(truncateAtStop('abcSTOPdef', ['STOP'])).toBe('abc');
  });

  it('picks the earliest of several markers', () => {
    expect(truncateAtStop('a|b;c', [';', '|'])).toBe('a');
  });

  it('leaves text without markers alone', () => {
    expect(truncateAtStop('hello', ['STOP'])).toBe('hello');
  });

  it('ignores empty markers', () => {
    expect(truncateAtStop('hello', [''])).toBe('hello');
  });
});

describe('SeededCompleter', () => {
  it('returns exactly n scored choices with the model id', () => {
    const res = completer.complete({ prompt: 'p', n: 4 });
    expect(res.choices).toHaveLength(4);
    expect(res.model).toBe('test-model');
    for (const ch of res.choices) {
      expect(typeof ch.text).toBe('string');
      expect(ch.score).toBeGreaterThanOrEqual(0);
      expect(ch.score).toBeLessThan(1);
    }
  });

  it('is deterministic for identical requests', () => {
    const a = completer.complete({ prompt: 'x = y +', n: 3, seed: 5 });
    const b = completer.complete({ prompt: 'x = y +', n: 3, seed: 5 });
    expect(a).toEqual(b);
  });

  it('changes output when the request seed changes', () => {
    const a = completer.complete({ prompt: 'x = y +', n: 1, seed: 5 });
    const b = completer.complete({ prompt: 'x = y +', n: 1, seed: 6 });
    expect(a).not.toEqual(b);
  });

  it('truncates every choice at the stop marker', () => {
    const res = completer.complete({ prompt: 'p', n: 20, seed: 1, stop: ['\n'] });
    for (const ch of res.choices) {
      expect(ch.text).not.toContain('\n');
    }
  });

  it('caps the word count at max_tokens', () => {
    const res = completer.complete({ prompt: 'p', n: 10, seed: 2, maxTokens: 5 });
    for (const ch of res.choices) {
      const words = ch.text.split(' ').filter((w) => w.length > 0);
      expect(words.length).toBeLessThanOrEqual(5);
    }
  });
});
