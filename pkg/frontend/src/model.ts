/** Shared shapes mirroring the service's JSON bodies. */

export type NodeKind = "query" | "concept";

export interface TreeNodeData {
  id: number;
  words: string[];
  kind: NodeKind;
  parent: number | null;
}

export interface TreeData {
  root: number;
  nodes: TreeNodeData[];
}

export type Mark = "hot" | "cold" | null;

export interface ResultDoc {
  doc_id: number;
  url: string;
  score: number;
  depth: number;
  origin: string;
  title: string;
  abstract: string;
  mark?: Mark;
}

export type SearchStatus = "idle" | "running" | "done";

export interface ResultsData {
  status: SearchStatus;
  results: ResultDoc[];
}

export type SpiderState =
  | "waiting"
  | "connecting"
  | "parsing"
  | "ranking"
  | "done"
  | "dead";

export interface SpiderEventData {
  task_id: number;
  state: SpiderState;
  happiness: number;
  url: string;
}

export interface SuggestionData {
  word: string;
  dp: number;
  min_proximity: number;
}

export interface FeedbackData {
  parent_query_id: number;
  derived_query_id: number;
  words: SuggestionData[];
}
