/** Thin typed client over the service's HTTP surface.
 *
 * Every UI action goes through one of these calls, so anything the UI can
 * do is replayable with plain HTTP.  The fetch function is injectable for
 * tests.
 */

import type { FeedbackData, ResultsData, TreeData, TreeNodeData } from "./model.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class Api {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) {
      let detail = `${method} ${path} failed (${res.status})`;
      try {
        const data = (await res.json()) as { detail?: string };
        if (data.detail) detail = data.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  getTree(): Promise<TreeData> {
    return this.request("GET", "/tree");
  }

  putTree(tree: TreeData): Promise<TreeData> {
    return this.request("PUT", "/tree", tree);
  }

  addNode(node: Omit<TreeNodeData, "id">): Promise<{ id: number }> {
    return this.request("POST", "/tree/node", node);
  }

  deleteNode(id: number): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/tree/node/${id}`);
  }

  startSearch(queryId: number, options: Record<string, unknown> = {}): Promise<unknown> {
    return this.request("POST", `/search/${queryId}/start`, options);
  }

  stopSearch(queryId: number): Promise<{ ok: boolean }> {
    return this.request("POST", `/search/${queryId}/stop`);
  }

  getResults(queryId: number): Promise<ResultsData> {
    return this.request("GET", `/search/${queryId}/results`);
  }

  markDoc(docId: number, mark: "hot" | "cold" | "clear"): Promise<{ ok: boolean }> {
    return this.request("POST", `/results/${docId}/mark`, { mark });
  }

  runFeedback(queryId: number): Promise<FeedbackData> {
    return this.request("POST", `/feedback/${queryId}`, {});
  }

  eventsUrl(queryId: number): string {
    return `${this.base}/search/${queryId}/events`;
  }
}
