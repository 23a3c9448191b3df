import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { mount } from "../src/render.js";
import { GridStore } from "../src/state.js";

import { FakeClient, SAMPLE, flush, response, suggestion } from "./helpers.js";

function setup() {
  const client = new FakeClient();
  const store = new GridStore(client as unknown as ApiClient, SAMPLE, 5);
  const root = document.createElement("div");
  document.body.appendChild(root);
  mount(root, store, client as unknown as ApiClient);
  return { client, store, root };
}

describe("grid rendering", () => {
  it("renders headings and cells", () => {
    const { root } = setup();
    const headings = [...root.querySelectorAll("th")].map((n) => n.textContent);
    expect(headings).toEqual(["player", "caps", "nickname"]);
    expect(root.querySelectorAll("td")).toHaveLength(6);
  });

  it("clicking a cell enters the loading state", async () => {
    const { root } = setup();
    (root.querySelector('td[data-row="0"][data-col="1"]') as HTMLElement).click();
    await flush();
    expect(root.querySelector(".panel")!.getAttribute("data-state")).toBe("loading");
  });
});

describe("suggestion panel rendering", () => {
  async function withResults() {
    const ctx = setup();
    const p = ctx.store.selectCell(0, 1);
    ctx.client.pending[0]!.resolve(response("caps", [
      suggestion({ canonical: "51", display: "51", score: 0.8, rank: 1,
        evidence: [{ kind: "tc", tableId: "src1", pageTitle: "stats page",
                     heading: "caps", rawText: "51" }] }),
      suggestion({ canonical: "47", display: "47", score: 0.4, rank: 2 }),
      suggestion({ canonical: "EMPTY", isEmpty: true, score: 0.1, rank: 3 }),
    ]));
    await p;
    await flush();
    return ctx;
  }

  it("lists suggestions in server order with raw scores and bars", async () => {
    const { root } = await withResults();
    const items = [...root.querySelectorAll(".suggestion")];
    expect(items.map((n) => n.getAttribute("data-canonical")))
      .toEqual(["51", "47", "EMPTY"]);
    const scores = [...root.querySelectorAll(".suggestion-score")]
      .map((n) => n.textContent);
    expect(scores).toEqual(["0.8000", "0.4000", "0.1000"]);
    const widths = [...root.querySelectorAll(".score-bar")]
      .map((n) => (n as HTMLElement).style.width);
    expect(widths).toEqual(["100.0%", "50.0%", "12.5%"]);
  });

  it("shows expandable evidence for backed suggestions", async () => {
    const { root } = await withResults();
    const first = root.querySelector(".suggestion")!;
    const evidence = first.querySelector(".evidence-list")!;
    expect(evidence.textContent).toContain("stats page");
    expect(evidence.textContent).toContain("caps");
  });

  it("accept button fills the grid cell", async () => {
    const { root } = await withResults();
    (root.querySelector(".suggestion .accept") as HTMLElement).click();
    await flush();
    const cell = root.querySelector('td[data-row="0"][data-col="1"]')!;
    expect(cell.textContent).toBe("51");
    expect(root.querySelector(".panel")!.getAttribute("data-state")).toBe("idle");
  });

  it("mark-empty button clears and badges the cell", async () => {
    const { root } = await withResults();
    (root.querySelector("button.mark-empty") as HTMLElement).click();
    await flush();
    const cell = root.querySelector('td[data-row="0"][data-col="1"]')!;
    expect(cell.textContent).toBe("");
    expect(cell.classList.contains("verified-empty")).toBe(true);
  });

  it("renders an error banner with a retry control", async () => {
    const { client, store, root } = setup();
    const p = store.selectCell(0, 1);
    client.pending[0]!.reject(new Error("offline"));
    await p;
    await flush();
    expect(root.querySelector(".error-banner")).not.toBeNull();
    expect(root.querySelector("button.retry")).not.toBeNull();
  });

  it("evidence link opens the read-only source viewer", async () => {
    const ctx = await withResults();
    ctx.client.tables["src1"] = {
      id: "src1", pageTitle: "stats page", caption: "fixture",
      headings: ["player", "caps"],
      rows: [[{ text: "Player AA" }, { text: "51" }]],
    };
    (ctx.root.querySelector(".view-source") as HTMLElement).click();
    await flush(6);
    const viewer = ctx.root.querySelector(".source-viewer");
    expect(viewer).not.toBeNull();
    expect(viewer!.textContent).toContain("stats page");
    expect(viewer!.querySelectorAll("td")).toHaveLength(2);
  });
});
