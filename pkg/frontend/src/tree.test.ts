import { describe, expect, it } from "vitest";

import type { TreeData } from "./model.js";
import {
  canRename,
  canReparent,
  childIndex,
  isDescendant,
  nodeIcon,
  nodeLabel,
  renamed,
  reparented,
} from "./tree.js";

function sample(): TreeData {
  return {
    root: 0,
    nodes: [
      { id: 0, words: [], kind: "concept", parent: null },
      { id: 1, words: ["space", "exploration"], kind: "concept", parent: 0 },
      { id: 2, words: ["nasa"], kind: "concept", parent: 1 },
      { id: 3, words: ["voyager", "project"], kind: "query", parent: 2 },
      { id: 4, words: ["music"], kind: "concept", parent: 0 },
    ],
  };
}

describe("childIndex", () => {
  it("groups children under their parent, ordered by id", () => {
    const index = childIndex(sample());
    expect(index.get(0)?.map((n) => n.id)).toEqual([1, 4]);
    expect(index.get(2)?.map((n) => n.id)).toEqual([3]);
  });
});

describe("isDescendant", () => {
  it("sees transitive descendants", () => {
    expect(isDescendant(sample(), 1, 3)).toBe(true);
    expect(isDescendant(sample(), 4, 3)).toBe(false);
  });

  it("treats a node as its own descendant", () => {
    expect(isDescendant(sample(), 2, 2)).toBe(true);
  });
});

describe("canReparent", () => {
  it("allows moving a query under another concept", () => {
    expect(canReparent(sample(), 3, 4)).toBe(true);
  });

  it("refuses drops onto the moved node's own subtree", () => {
    expect(canReparent(sample(), 1, 2)).toBe(false);
    expect(canReparent(sample(), 1, 1)).toBe(false);
  });

  it("refuses drops onto queries", () => {
    expect(canReparent(sample(), 4, 3)).toBe(false);
  });

  it("refuses moving the root or no-op drops", () => {
    expect(canReparent(sample(), 0, 4)).toBe(false);
    expect(canReparent(sample(), 2, 1)).toBe(false); // already there
  });
});

describe("reparented", () => {
  it("returns a new tree and leaves the input untouched", () => {
    const before = sample();
    const after = reparented(before, 3, 4);
    expect(before.nodes.find((n) => n.id === 3)?.parent).toBe(2);
    expect(after.nodes.find((n) => n.id === 3)?.parent).toBe(4);
  });
});

describe("rename", () => {
  it("refuses empty word-sets except on the root", () => {
    expect(canRename(sample(), 3, ["  "])).toBe(false);
    expect(canRename(sample(), 0, [])).toBe(true);
    expect(canRename(sample(), 3, ["New", "Words"])).toBe(true);
  });

  it("lowercases and trims", () => {
    const after = renamed(sample(), 3, [" Voyager ", "PROBE"]);
    expect(after.nodes.find((n) => n.id === 3)?.words).toEqual(["voyager", "probe"]);
  });
});

describe("labels and icons", () => {
  it("folder for concepts, sheet for queries", () => {
    const tree = sample();
    const concept = tree.nodes[1]!;
    const query = tree.nodes[3]!;
    expect(nodeIcon(concept)).not.toBe(nodeIcon(query));
    expect(nodeLabel(query)).toBe("voyager project");
    expect(nodeLabel(tree.nodes[0]!)).toBe("(all topics)");
  });
});
