/** Spider activity strip: one colored cell per spider, blue tone by happiness. */

import type { SpiderEventData, SpiderState } from "./model.js";

export interface SpiderCell {
  taskId: number;
  state: SpiderState;
  happiness: number;
}

export const SCORE_SCALE = 1000; // happiness values live in [0, amplitude]

/**
 * Blue tone proportional to happiness: lightness rises linearly from 25%
 * (gloomy) to 85% (delighted), so lighter always means happier.
 */
export function happinessTone(happiness: number, scale: number = SCORE_SCALE): string {
  const clamped = Math.max(0, Math.min(scale, happiness));
  const lightness = 25 + (clamped / scale) * 60;
  return `hsl(210, 80%, ${lightness}%)`;
}

export function toneLightness(css: string): number {
  const match = /(\d+(?:\.\d+)?)%\)$/.exec(css);
  return match ? Number(match[1]) : NaN;
}

export class SpiderPanel {
  private cells = new Map<number, SpiderCell>();

  apply(event: SpiderEventData): void {
    this.cells.set(event.task_id, {
      taskId: event.task_id,
      state: event.state,
      happiness: event.happiness,
    });
  }

  /** Spiders scheduled but not yet started. */
  pendingCount(): number {
    let pending = 0;
    for (const cell of this.cells.values()) {
      if (cell.state === "waiting") pending += 1;
    }
    return pending;
  }

  /** Cells in task order; finished spiders stay visible, tone frozen. */
  snapshot(): SpiderCell[] {
    return [...this.cells.values()].sort((a, b) => a.taskId - b.taskId);
  }

  clear(): void {
    this.cells.clear();
  }
}
