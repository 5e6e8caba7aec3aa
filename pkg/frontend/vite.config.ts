import { defineConfig } from "vite";

// base "./" keeps asset paths relative, so the bundle works when the API
// service mounts dist/ under /ui as well as from any static file host
export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
});
