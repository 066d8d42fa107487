/** Search event stream with reconnect and duplicate suppression.
 *
 * Result rows are idempotent by doc_id, so a reconnect (the stream drops
 * whenever a proxy hiccups) never produces duplicate rows; spider cells
 * are keyed by task id and simply overwritten.  Reconnects back off
 * linearly and stop once the server says the search is done.
 */

import type { ResultDoc, SpiderEventData } from "./model.js";

export interface EventSourceLike {
  addEventListener(type: string, handler: (ev: MessageEvent) => void): void;
  close(): void;
  onerror: ((ev: unknown) => void) | null;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamHandlers {
  onResult(doc: ResultDoc): void;
  onSpider(cell: SpiderEventData): void;
  onDone(): void;
  onStatusChange?(connected: boolean): void;
}

export class SearchStream {
  private source: EventSourceLike | null = null;
  private seenDocs = new Set<number>();
  private finished = false;
  private attempts = 0;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private handlers: StreamHandlers,
    private factory: EventSourceFactory = (u) => new EventSource(u) as EventSourceLike,
    private baseDelayMs: number = 500,
  ) {}

  get resultCount(): number {
    return this.seenDocs.size;
  }

  connect(): void {
    if (this.finished) return;
    this.source = this.factory(this.url);
    this.handlers.onStatusChange?.(true);

    this.source.addEventListener("result", (ev) => {
      const doc = JSON.parse(ev.data) as ResultDoc;
      if (this.seenDocs.has(doc.doc_id)) return;
      this.seenDocs.add(doc.doc_id);
      this.handlers.onResult(doc);
    });
    this.source.addEventListener("spider", (ev) => {
      this.handlers.onSpider(JSON.parse(ev.data) as SpiderEventData);
    });
    this.source.addEventListener("done", () => {
      this.finished = true;
      this.close();
      this.handlers.onDone();
    });
    this.source.onerror = () => {
      if (this.finished) return;
      this.handlers.onStatusChange?.(false);
      this.source?.close();
      this.source = null;
      this.attempts += 1;
      this.reconnectTimer = setTimeout(() => this.connect(), this.attempts * this.baseDelayMs);
    };
  }

  close(): void {
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.source?.close();
    this.source = null;
  }
}
