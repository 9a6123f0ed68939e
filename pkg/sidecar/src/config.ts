import { z } from 'zod';

const envSchema = z.object({
  MODEL_ID: z.string().min(1).default('hashed-encoder'),
  HOST: z.string().min(1).default('127.0.0.1'),
  // PORT=0 binds an ephemeral port; the startup log reports the real one
  PORT: z.coerce.number().int().min(0).max(65535).default(8080),
  EMBED_DIM: z.coerce.number().int().min(1).max(4096).default(64),
  SEED: z.coerce.number().int().default(0),
});

export interface SidecarConfig {
  host: string;
  port: number;
  dim: number;
  seed: number;
  modelId: string;
}

export function configFromEnv(env: NodeJS.ProcessEnv = process.env): SidecarConfig {
  const parsed = envSchema.parse({
    MODEL_ID: env.MODEL_ID,
    HOST: env.HOST,
    PORT: env.PORT,
    EMBED_DIM: env.EMBED_DIM,
    SEED: env.SEED,
  });
  return {
    host: parsed.HOST,
    port: parsed.PORT,
    dim: parsed.EMBED_DIM,
    seed: parsed.SEED,
    modelId: parsed.MODEL_ID,
  };
}
