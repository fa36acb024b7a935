import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // most tests shell out to the search CLI, often several times
    testTimeout: 300_000,
    hookTimeout: 60_000,
  },
});
