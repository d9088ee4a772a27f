/**
 * Workbench state: a pure function of server responses plus uncommitted
 * edits. No statistic displayed in the UI is computed here; every
 * number traces back to a service response field.
 */

import type {
  CondenseStats,
  JobState,
  Neighbor,
  PosClass,
  SeriesPayload,
  ThresholdGrid,
  TopicModel,
} from "./api.js";

export const POS_CLASSES: PosClass[] = ["noun", "verb", "adjective", "adverb", "default"];

export const DEFAULT_THRESHOLDS: ThresholdGrid = {
  noun: { left: 21, right: 14 },
  verb: { left: 24, right: 15 },
  adjective: { left: 7, right: 9 },
  adverb: { left: 12, right: 20 },
  default: { left: 15, right: 15 },
};

export function cloneGrid(grid: ThresholdGrid): ThresholdGrid {
  const copy = {} as ThresholdGrid;
  for (const cls of POS_CLASSES) {
    copy[cls] = { ...grid[cls] };
  }
  return copy;
}

export interface JobView {
  id: string;
  status: JobState;
  progress: number;
  error?: string;
}

export interface WorkbenchState {
  central: string;
  k: number;
  committed: ThresholdGrid;
  edited: ThresholdGrid;
  neighbors: Neighbor[] | null;
  /** Previous neighbor list stays visible but grayed while counts rebuild. */
  neighborsStale: boolean;
  stats: CondenseStats | null;
  condensedId: string | null;
  model: TopicModel | null;
  countsJob: JobView | null;
  topicsJob: JobView | null;
  freq: SeriesPayload | null;
  sim: SeriesPayload | null;
  notice: string | null;
}

export function initialState(): WorkbenchState {
  return {
    central: "",
    k: 300,
    committed: cloneGrid(DEFAULT_THRESHOLDS),
    edited: cloneGrid(DEFAULT_THRESHOLDS),
    neighbors: null,
    neighborsStale: false,
    stats: null,
    condensedId: null,
    model: null,
    countsJob: null,
    topicsJob: null,
    freq: null,
    sim: null,
    notice: null,
  };
}

export interface EditResult {
  ok: boolean;
  error?: string;
}

/** Stage a grid edit; negative values are rejected inline, not staged. */
export function editThreshold(
  state: WorkbenchState,
  cls: PosClass,
  side: "left" | "right",
  value: number,
): EditResult {
  if (!Number.isFinite(value) || value < 0) {
    return { ok: false, error: "thresholds must be numbers >= 0" };
  }
  state.edited[cls][side] = value;
  return { ok: true };
}

export function cellEdited(state: WorkbenchState, cls: PosClass, side: "left" | "right"): boolean {
  return state.edited[cls][side] !== state.committed[cls][side];
}

export function hasUncommittedEdits(state: WorkbenchState): boolean {
  return POS_CLASSES.some(
    (cls) => cellEdited(state, cls, "left") || cellEdited(state, cls, "right"),
  );
}

/** Condense is disabled when every neighbor has been excluded. */
export function canCondense(state: WorkbenchState): boolean {
  if (!state.central) {
    return false;
  }
  const neighbors = state.neighbors;
  if (neighbors && neighbors.length > 0 && neighbors.every((n) => !n.included)) {
    return false;
  }
  return true;
}
