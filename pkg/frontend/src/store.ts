/** Client state: the acknowledged server tree plus live search data.
 *
 * All mutations round-trip through the API; the store only commits what
 * the server acknowledged (optimistic renders are handed out as copies
 * and discarded on rejection), so a hard refresh rebuilds the identical
 * view from GET endpoints alone.
 */

import { Api } from "./api.js";
import type { Mark, ResultDoc, SearchStatus, TreeData } from "./model.js";
import { SpiderPanel } from "./panel.js";
import { canRename, canReparent, renamed, reparented } from "./tree.js";

export type Listener = () => void;

export class Store {
  tree: TreeData = { root: 0, nodes: [] };
  selectedQuery: number | null = null;
  results: ResultDoc[] = [];
  searchStatus: SearchStatus = "idle";
  panel = new SpiderPanel();
  streamConnected = false;
  lastError: string | null = null;

  private listeners: Listener[] = [];

  constructor(public api: Api) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  private fail(err: unknown): void {
    this.lastError = err instanceof Error ? err.message : String(err);
    this.notify();
  }

  async refreshTree(): Promise<void> {
    this.tree = await this.api.getTree();
    this.notify();
  }

  async refreshResults(): Promise<void> {
    if (this.selectedQuery === null) return;
    const data = await this.api.getResults(this.selectedQuery);
    this.results = data.results;
    this.searchStatus = data.status;
    this.notify();
  }

  async selectQuery(id: number): Promise<void> {
    this.selectedQuery = id;
    this.results = [];
    this.searchStatus = "idle";
    this.panel.clear();
    this.notify();
    await this.refreshResults().catch((e) => this.fail(e));
  }

  /** Drag-and-drop re-parent: optimistic render, rollback on rejection. */
  async reparentNode(moved: number, target: number): Promise<boolean> {
    if (!canReparent(this.tree, moved, target)) return false;
    const acknowledged = this.tree;
    this.tree = reparented(acknowledged, moved, target);
    this.notify();
    try {
      this.tree = await this.api.putTree(this.tree);
      this.notify();
      return true;
    } catch (err) {
      this.tree = acknowledged; // roll back to the server's truth
      this.fail(err);
      return false;
    }
  }

  async renameNode(id: number, words: string[]): Promise<boolean> {
    if (!canRename(this.tree, id, words)) return false;
    const acknowledged = this.tree;
    this.tree = renamed(acknowledged, id, words);
    this.notify();
    try {
      this.tree = await this.api.putTree(this.tree);
      this.notify();
      return true;
    } catch (err) {
      this.tree = acknowledged;
      this.fail(err);
      return false;
    }
  }

  async addNode(words: string[], kind: "query" | "concept", parent: number | null): Promise<void> {
    try {
      await this.api.addNode({ words, kind, parent });
      await this.refreshTree();
    } catch (err) {
      this.fail(err);
    }
  }

  async removeNode(id: number): Promise<void> {
    try {
      await this.api.deleteNode(id);
      if (this.selectedQuery === id) this.selectedQuery = null;
      await this.refreshTree();
    } catch (err) {
      this.fail(err);
    }
  }

  async markResult(docId: number, mark: "hot" | "cold" | "clear"): Promise<void> {
    try {
      await this.api.markDoc(docId, mark);
      const applied: Mark = mark === "clear" ? null : mark;
      this.results = this.results.map((r) =>
        r.doc_id === docId ? { ...r, mark: applied } : r,
      );
      this.notify();
    } catch (err) {
      this.fail(err);
    }
  }

  hotCount(): number {
    return this.results.filter((r) => r.mark === "hot").length;
  }

  /** Feedback needs at least one hot mark; the button stays disabled until then. */
  canRunFeedback(): boolean {
    return this.selectedQuery !== null && this.hotCount() > 0;
  }

  async runFeedback(): Promise<number | null> {
    if (!this.canRunFeedback() || this.selectedQuery === null) return null;
    try {
      const out = await this.api.runFeedback(this.selectedQuery);
      await this.refreshTree(); // the derived query pops up in the tree
      return out.derived_query_id;
    } catch (err) {
      this.fail(err);
      return null;
    }
  }

  appendResult(doc: ResultDoc): void {
    if (!this.results.some((r) => r.doc_id === doc.doc_id)) {
      this.results = [...this.results, doc];
    }
    this.notify();
  }
}
