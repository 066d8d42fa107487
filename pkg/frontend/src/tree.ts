/** Pure view-model operations on the concept tree.
 *
 * The rendered structure always mirrors the last server-acknowledged tree;
 * gestures produce an optimistic copy that is committed only if the server
 * accepts the corresponding mutation, otherwise the acknowledged tree is
 * re-rendered unchanged.
 */

import type { TreeData, TreeNodeData } from "./model.js";

export function nodeById(tree: TreeData, id: number): TreeNodeData | undefined {
  return tree.nodes.find((n) => n.id === id);
}

export function childIndex(tree: TreeData): Map<number | null, TreeNodeData[]> {
  const index = new Map<number | null, TreeNodeData[]>();
  for (const node of tree.nodes) {
    const siblings = index.get(node.parent) ?? [];
    siblings.push(node);
    index.set(node.parent, siblings);
  }
  for (const siblings of index.values()) {
    siblings.sort((a, b) => a.id - b.id);
  }
  return index;
}

/** True when `candidate` sits in the subtree rooted at `ancestor`. */
export function isDescendant(tree: TreeData, ancestor: number, candidate: number): boolean {
  let cursor: number | null = candidate;
  const seen = new Set<number>();
  while (cursor !== null) {
    if (cursor === ancestor) return true;
    if (seen.has(cursor)) return false; // defensive against malformed input
    seen.add(cursor);
    cursor = nodeById(tree, cursor)?.parent ?? null;
  }
  return false;
}

/**
 * Whether dropping `moved` onto `target` is a legal re-parent gesture:
 * the target must be a concept, not the node itself, not its current
 * parent (no-op), and not inside the moved subtree (cycles).
 */
export function canReparent(tree: TreeData, moved: number, target: number): boolean {
  const movedNode = nodeById(tree, moved);
  const targetNode = nodeById(tree, target);
  if (!movedNode || !targetNode) return false;
  if (moved === tree.root) return false;
  if (targetNode.kind !== "concept") return false;
  if (movedNode.parent === target) return false;
  return !isDescendant(tree, moved, target);
}

/** New tree with the node re-parented; input trees are never mutated. */
export function reparented(tree: TreeData, moved: number, target: number): TreeData {
  return {
    root: tree.root,
    nodes: tree.nodes.map((n) => (n.id === moved ? { ...n, parent: target } : n)),
  };
}

/** Rename is refused for empty word-sets everywhere but the dummy root. */
export function canRename(tree: TreeData, id: number, words: string[]): boolean {
  if (!nodeById(tree, id)) return false;
  const cleaned = words.map((w) => w.trim().toLowerCase()).filter(Boolean);
  return cleaned.length > 0 || id === tree.root;
}

export function renamed(tree: TreeData, id: number, words: string[]): TreeData {
  const cleaned = words.map((w) => w.trim().toLowerCase()).filter(Boolean);
  return {
    root: tree.root,
    nodes: tree.nodes.map((n) => (n.id === id ? { ...n, words: cleaned } : n)),
  };
}

export function nodeLabel(node: TreeNodeData): string {
  return node.words.length ? node.words.join(" ") : "(all topics)";
}

/** Folder for concepts, sheet for queries. */
export function nodeIcon(node: TreeNodeData): string {
  return node.kind === "concept" ? "\u{1F4C1}" : "\u{1F4C4}";
}
