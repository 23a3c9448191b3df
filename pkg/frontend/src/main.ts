/** Bootstrap: base-URL input, table import/export, grid and panel. */

import { ApiClient } from "./api.js";
import { mount } from "./render.js";
import { GridStore } from "./state.js";

const SAMPLE_TABLE = JSON.stringify({
  id: "scratch",
  pageTitle: "scratch table",
  caption: "editable sample",
  headings: ["player", "team", "caps", "nickname"],
  rows: [
    [{ text: "Player AA", entity: "E_p00" }, { text: "" }, { text: "" }, { text: "" }],
    [{ text: "Player AB", entity: "E_p01" }, { text: "" }, { text: "" }, { text: "" }],
    [{ text: "Player AC", entity: "E_p02" }, { text: "" }, { text: "" }, { text: "" }],
  ],
});

function bootstrap(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("server") ?? "http://localhost:8080";

  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const client = new ApiClient(baseUrl);
  let store = new GridStore(client, SAMPLE_TABLE);
  let unmount = mount(root, store, client);

  const importBox = document.getElementById("import-box") as HTMLTextAreaElement | null;
  const importBtn = document.getElementById("import-btn");
  const exportBtn = document.getElementById("export-btn");

  importBtn?.addEventListener("click", () => {
    if (!importBox || !importBox.value.trim()) return;
    try {
      unmount();
      store = new GridStore(client, importBox.value.trim());
      unmount = mount(root, store, client);
    } catch (err) {
      window.alert(`could not import table: ${err}`);
    }
  });

  exportBtn?.addEventListener("click", () => {
    if (importBox) importBox.value = store.exportText();
  });
}

bootstrap();
