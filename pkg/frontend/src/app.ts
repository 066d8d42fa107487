/** DOM wiring: two panes (concept tree left, documents right), the keyword
 * bar above the tree, and the spider strip along the bottom. */

import { Api } from "./api.js";
import type { ResultDoc, TreeNodeData } from "./model.js";
import { happinessTone } from "./panel.js";
import { Store } from "./store.js";
import { SearchStream } from "./stream.js";
import { childIndex, nodeById, nodeIcon, nodeLabel } from "./tree.js";

const api = new Api("");
const store = new Store(api);
let stream: SearchStream | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function renderKeywordBar(): void {
  const bar = el<HTMLDivElement>("keyword-bar");
  if (store.selectedQuery === null) {
    bar.textContent = "select a query";
    return;
  }
  const node = nodeById(store.tree, store.selectedQuery);
  bar.textContent = node ? node.words.join(" ") : "";
}

function renderTree(): void {
  const container = el<HTMLDivElement>("tree");
  container.textContent = "";
  const index = childIndex(store.tree);

  const renderNode = (node: TreeNodeData, depth: number): void => {
    const row = document.createElement("div");
    row.className = "tree-row" + (node.id === store.selectedQuery ? " selected" : "");
    row.style.paddingLeft = `${depth * 16}px`;
    row.dataset.nodeId = String(node.id);
    row.draggable = node.id !== store.tree.root;
    row.textContent = `${nodeIcon(node)} ${nodeLabel(node)}`;

    if (node.kind === "query") {
      row.addEventListener("click", () => void store.selectQuery(node.id));
    }
    row.addEventListener("dragstart", (ev) => {
      ev.dataTransfer?.setData("text/node-id", String(node.id));
    });
    row.addEventListener("dragover", (ev) => {
      if (node.kind === "concept") ev.preventDefault();
    });
    row.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const moved = Number(ev.dataTransfer?.getData("text/node-id"));
      void store.reparentNode(moved, node.id).then((accepted) => {
        if (!accepted) {
          row.classList.add("refused"); // visual cue for an illegal drop
          setTimeout(() => row.classList.remove("refused"), 600);
        }
      });
    });

    container.appendChild(row);
    for (const child of index.get(node.id) ?? []) renderNode(child, depth + 1);
  };

  const root = nodeById(store.tree, store.tree.root);
  if (root) renderNode(root, 0);
}

function markFace(doc: ResultDoc): string {
  if (doc.mark === "hot") return "\u{1F60A}";
  if (doc.mark === "cold") return "\u{2639}\u{FE0F}";
  return "\u{1F610}";
}

function renderResults(): void {
  const list = el<HTMLDivElement>("results");
  list.textContent = "";
  for (const doc of store.results) {
    const row = document.createElement("div");
    row.className = "result-row";

    const meta = document.createElement("span");
    meta.className = "result-meta";
    meta.textContent = `L${doc.depth} · ${doc.origin} · ${doc.score.toFixed(1)}`;

    const face = document.createElement("button");
    face.className = "face";
    face.textContent = markFace(doc);
    face.title = "cycle hot / cold / clear";
    face.addEventListener("click", () => {
      const next = doc.mark === "hot" ? "cold" : doc.mark === "cold" ? "clear" : "hot";
      void store.markResult(doc.doc_id, next);
    });

    const title = document.createElement("a");
    title.href = doc.url;
    title.target = "_blank";
    title.textContent = doc.title || doc.url;

    const abstract = document.createElement("div");
    abstract.className = "abstract";
    abstract.textContent = doc.abstract;

    row.append(meta, face, title, abstract);
    list.appendChild(row);
  }
  el<HTMLSpanElement>("status").textContent = store.searchStatus;
  const feedbackButton = el<HTMLButtonElement>("feedback");
  feedbackButton.disabled = !store.canRunFeedback();
  el<HTMLSpanElement>("feedback-hint").textContent = store.canRunFeedback()
    ? ""
    : "mark at least one result hot to enable feedback";
}

function renderSpiders(): void {
  const strip = el<HTMLDivElement>("spiders");
  strip.textContent = "";
  for (const cell of store.panel.snapshot()) {
    const box = document.createElement("span");
    box.className = "spider-cell";
    box.title = `#${cell.taskId} ${cell.state}`;
    box.style.background = happinessTone(cell.happiness);
    box.textContent = cell.state[0]?.toUpperCase() ?? "?";
    strip.appendChild(box);
  }
  el<HTMLSpanElement>("pending").textContent = String(store.panel.pendingCount());
}

function renderError(): void {
  const banner = el<HTMLDivElement>("error");
  banner.textContent = store.lastError ?? "";
  banner.style.display = store.lastError ? "block" : "none";
}

function renderAll(): void {
  renderKeywordBar();
  renderTree();
  renderResults();
  renderSpiders();
  renderError();
}

function openStream(queryId: number): void {
  stream?.close();
  store.panel.clear();
  stream = new SearchStream(api.eventsUrl(queryId), {
    onResult: (doc) => store.appendResult(doc),
    onSpider: (cell) => {
      store.panel.apply(cell);
      renderSpiders();
    },
    onDone: () => {
      store.searchStatus = "done";
      void store.refreshResults();
    },
    onStatusChange: (connected) => {
      store.streamConnected = connected;
    },
  });
  stream.connect();
}

function wireControls(): void {
  el<HTMLButtonElement>("start").addEventListener("click", () => {
    const queryId = store.selectedQuery;
    if (queryId === null) return;
    store.searchStatus = "running";
    store.results = [];
    renderAll();
    void api
      .startSearch(queryId, {})
      .then(() => openStream(queryId))
      .catch((err) => {
        store.lastError = String(err instanceof Error ? err.message : err);
        store.searchStatus = "idle";
        renderAll();
      });
  });

  el<HTMLButtonElement>("stop").addEventListener("click", () => {
    if (store.selectedQuery !== null) void api.stopSearch(store.selectedQuery);
  });

  el<HTMLButtonElement>("feedback").addEventListener("click", () => {
    void store.runFeedback();
  });

  el<HTMLButtonElement>("add-query").addEventListener("click", () => {
    const words = prompt("query keywords (space separated)");
    if (!words || !words.trim()) return;
    void store.addNode(words.trim().split(/\s+/), "query", null);
  });

  el<HTMLButtonElement>("add-concept").addEventListener("click", () => {
    const words = prompt("concept words (space separated)");
    if (!words || !words.trim()) return;
    void store.addNode(words.trim().split(/\s+/), "concept", null);
  });

  el<HTMLButtonElement>("remove-node").addEventListener("click", () => {
    if (store.selectedQuery !== null) void store.removeNode(store.selectedQuery);
  });
}

async function boot(): Promise<void> {
  store.subscribe(renderAll);
  wireControls();
  await store.refreshTree();
  renderAll();
}

void boot();
