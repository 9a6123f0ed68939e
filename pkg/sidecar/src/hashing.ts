// Deterministic 64-bit hashing and a small seeded PRNG. Everything the
// service synthesizes (vectors, completion texts, scores) flows from these
// two primitives, so identical requests always get identical responses.

const MASK64 = (1n << 64n) - 1n;
const FNV_OFFSET = 14695981039346656037n;
const FNV_PRIME = 1099511628211n;

/** FNV-1a over the UTF-8 bytes of `text`, masked to 64 bits. */
export function hash64(text: string): bigint {
  const bytes = Buffer.from(text, 'utf8');
  let h = FNV_OFFSET;
  for (const b of bytes) {
    h ^= BigInt(b);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

/** splitmix64 stream. Statistical quality only; not for cryptography. */
export class SplitMix64 {
  private state: bigint;

  constructor(seed: bigint) {
    this.state = seed & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
    return z ^ (z >> 31n);
  }

  /** Uniform float in [0, 1). */
  nextFloat(): number {
    return Number(this.nextU64() >> 11n) / 2 ** 53;
  }

  /** Uniform integer in [lo, hi], bounds inclusive. */
  nextInt(lo: number, hi: number): number {
    return lo + Math.floor(this.nextFloat() * (hi - lo + 1));
  }

  /** Standard normal via Box-Muller; u is clamped so log() stays finite. */
  nextGaussian(): number {
    const u = Math.max(this.nextFloat(), 1e-12);
    const v = this.nextFloat();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }
}

/** PRNG keyed by the NUL-joined parts, so distinct keys never collide
 *  just because their concatenation happens to match. */
export function rngFor(parts: Array<string | number>): SplitMix64 {
  return new SplitMix64(hash64(parts.join('\x00')));
}
