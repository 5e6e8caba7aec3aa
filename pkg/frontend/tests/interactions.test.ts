import { afterEach, describe, expect, it } from "vitest";
import {
  boot,
  dblclick,
  descriptionHit,
  englishQuery,
  imageHit,
  pngBytes,
  singleClick,
  submitSearch,
  type Harness,
} from "./boot";

let harness: Harness;

afterEach(async () => {
  await harness.close();
});

function scriptImageSearch(h: Harness): void {
  h.server.on("POST", /^\/search\/image$/, () => ({
    json: { hits: [
      descriptionHit("d1", 1, 0.92, "a dog catching a frisbee", "b2"),
      descriptionHit("d2", 2, 0.85, "a dog on a lawn", "b3"),
    ] },
  }));
}

describe("double-click gestures", () => {
  it("turns a double-clicked description into a verbatim text search",
     async () => {
    harness = await boot();
    scriptImageSearch(harness);
    harness.server.on("POST", "/search/text", (req) => ({
      json: { query: englishQuery((req.json() as { query: string }).query),
              mode: "boon", hits: [imageHit("i9", 1, 0.88)] },
    }));

    // an image-to-text result list is on screen
    dblclick(harness, harness.$(".gallery-grid .result-image"));
    await harness.app.idle();
    const description = harness.$(".description-text");
    const verbatim = "a dog catching a frisbee";
    expect(description.textContent).toBe(verbatim);

    dblclick(harness, description);
    await harness.app.idle();

    const captured = harness.server.seen("POST", "/search/text");
    expect(captured).toHaveLength(1);
    expect(captured[0]!.json()).toEqual(
      { query: verbatim, mode: "boon", k: 12 });
  });

  it("sends nothing on a single click", async () => {
    harness = await boot();
    scriptImageSearch(harness);
    dblclick(harness, harness.$(".gallery-grid .result-image"));
    await harness.app.idle();

    singleClick(harness, harness.$(".description-text"));
    singleClick(harness, harness.$(".result-image"));
    await harness.app.idle();

    expect(harness.server.seen("POST", "/search/text")).toHaveLength(0);
    expect(harness.server.seen("POST", "/search/image")).toHaveLength(1);
  });

  it("dispatches one image search with the exact bytes of the " +
     "double-clicked image", async () => {
    harness = await boot();
    scriptImageSearch(harness);

    const first = harness.$(".gallery-grid .result-image");
    expect(first.getAttribute("data-item-id")).toBe("b1");
    dblclick(harness, first);
    await harness.app.idle();

    const captured = harness.server.seen("POST", "/search/image");
    expect(captured).toHaveLength(1);
    expect(captured[0]!.query.get("k")).toBe("12");
    const parts = captured[0]!.multipart();
    expect(parts).toHaveLength(1);
    expect(parts[0]!.name).toBe("image");
    expect(parts[0]!.filename).toBe("b1.png");
    // byte-for-byte what the payload route served for b1.png
    expect(Buffer.compare(parts[0]!.bytes, pngBytes("b1.png"))).toBe(0);
  });

  it("replaces the grid with description rows and thumbnails", async () => {
    harness = await boot();
    scriptImageSearch(harness);
    harness.server.on("POST", "/search/text", () => ({
      json: { query: englishQuery("dogs"), mode: "boon",
              hits: [imageHit("i1", 1, 0.9)] },
    }));

    submitSearch(harness, "dogs");
    await harness.app.idle();
    expect(harness.$all(".result-grid .result-image")).toHaveLength(1);

    dblclick(harness, harness.$(".result-grid .result-image"));
    await harness.app.idle();

    expect(harness.$all(".result-grid")).toHaveLength(0);
    const rows = harness.$all(".description-row");
    expect(rows).toHaveLength(2);
    expect(rows[0]!.querySelector(".description-text")!.textContent)
      .toBe("a dog catching a frisbee");
    expect(rows[0]!.querySelector(".result-image")!.getAttribute("data-item-id"))
      .toBe("b2");
  });
});
