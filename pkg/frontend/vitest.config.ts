import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The integration test boots the color service and waits for its first
    // optimization pass; everything else finishes in milliseconds.
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
