#!/usr/bin/env node
import { configFromEnv } from './config.js';
import { SidecarServer } from './server.js';

async function main() {
  const config = configFromEnv();
  const server = new SidecarServer(config);
  const port = await server.start();
  await server.whenReady();
  console.log(
    `model-sidecar listening on http://${config.host}:${port} ` +
    `(model=${config.modelId}, dim=${config.dim})`,
  );
  const shutdown = () => {
    server.stop()
      .then(() => process.exit(0))
      .catch((err) => {
        console.error('shutdown error:', err);
        process.exit(1);
      });
  };
  process.on('SIGINT', shutdown);
  process.on('SIGTERM', shutdown);
}

main().catch((err) => {
  console.error('failed to start:', err);
  process.exit(1);
});
