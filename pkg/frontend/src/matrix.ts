/**
 * View model for the dominance matrix.
 *
 * Cell verdicts are taken verbatim from the predictions endpoint; this
 * module only classifies them for styling and computes the attribute
 * diff shown on inferred cells.  It never derives a verdict locally.
 */

import type { PredictionCell, PredictionsResponse } from "./types.js";

export type CellState = "observed" | "inferred-first" | "inferred-second" | "none";

export interface MatrixCellVm {
  first: string;
  second: string;
  state: CellState;
  /** Hover text; set only on no-prediction cells. */
  tooltip: string | null;
  /** Attribute labels present in exactly one of the pair; inferred cells only. */
  diff: string[] | null;
}

export interface MatrixVm {
  version: number;
  alternatives: string[];
  cells: MatrixCellVm[];
}

export const MAX_MATRIX_ALTERNATIVES = 12;
export const NO_PREDICTION_TOOLTIP = "cautious: no prediction";

/** Dedupe while keeping first-seen order; reject oversized selections. */
export function normalizeSelection(alternatives: readonly string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const alt of alternatives) {
    if (!seen.has(alt)) {
      seen.add(alt);
      out.push(alt);
    }
  }
  if (out.length > MAX_MATRIX_ALTERNATIVES) {
    throw new RangeError(
      `matrix selection is limited to ${MAX_MATRIX_ALTERNATIVES} alternatives, got ${out.length}`,
    );
  }
  return out;
}

/** Attributes on which the two alternatives disagree, as display labels. */
export function attributeDiff(
  first: string,
  second: string,
  names: readonly string[] | null,
): string[] {
  const out: string[] = [];
  for (let i = 0; i < first.length; i += 1) {
    if (first[i] !== second[i]) {
      out.push(names?.[i] ?? String(i + 1));
    }
  }
  return out;
}

export function cellState(cell: PredictionCell): CellState {
  if (cell.observed) return "observed";
  if (cell.direction === "prefer_first") return "inferred-first";
  if (cell.direction === "prefer_second") return "inferred-second";
  return "none";
}

export function buildMatrixVm(
  response: PredictionsResponse,
  names: readonly string[] | null,
): MatrixVm {
  const cells = response.cells.map((cell): MatrixCellVm => {
    const state = cellState(cell);
    const inferred = state === "inferred-first" || state === "inferred-second";
    return {
      first: cell.first,
      second: cell.second,
      state,
      tooltip: state === "none" ? NO_PREDICTION_TOOLTIP : null,
      diff: inferred ? attributeDiff(cell.first, cell.second, names) : null,
    };
  });
  return {
    version: response.version,
    alternatives: [...response.alternatives],
    cells,
  };
}

export function emptyMatrix(version: number): MatrixVm {
  return { version, alternatives: [], cells: [] };
}
