import { z } from 'zod';

// Embed requests come in two shapes: a pre-tokenized list, or raw text
// the server tokenizes itself.
export const embedRequestSchema = z.union([
  z.object({ tokens: z.array(z.string()) }),
  z.object({ text: z.string() }),
]);

export const completeRequestSchema = z.object({
  prompt: z.string(),
  n: z.number().int().min(1).max(256).default(1),
  max_tokens: z.number().int().min(1).optional(),
  temperature: z.number().optional(),
  stop: z.array(z.string()).optional(),
  seed: z.number().int().optional(),
});

export type EmbedRequest = z.infer<typeof embedRequestSchema>;
export type CompleteRequest = z.infer<typeof completeRequestSchema>;

/** Short human-readable reason from a zod failure, for 400 bodies. */
export function firstIssue(error: z.ZodError): string {
  const issue = error.issues[0];
  if (!issue) return 'invalid request';
  const where = issue.path.join('.') || 'body';
  return `${where}: ${issue.message}`;
}
