/**
 * View model for the learned-structure panel: one card per simplest
 * compatible family plus the unifying union, with subsets rendered as
 * chips carrying a degree badge (how many attributes interact).
 *
 * Subsets arrive in wire form ("1+3"); highlighting compares wire keys
 * against the previously displayed version, so a subset counts as new
 * the first time this client sees it.
 */

import type { ThetaPayload } from "./types.js";

export interface SubsetChipVm {
  /** Wire form of the subset, e.g. "1+3". */
  key: string;
  label: string;
  degree: number;
  isNew: boolean;
}

export interface FamilyCardVm {
  title: string;
  chips: SubsetChipVm[];
}

export interface ThetaVm {
  version: number;
  families: FamilyCardVm[];
  unifying: SubsetChipVm[];
  empty: boolean;
}

export const EMPTY_THETA_MESSAGE = "no interactions learned yet";

export function subsetLabel(key: string, names: readonly string[] | null): string {
  const parts = key.split("+").map((text) => {
    const index = Number(text);
    return names?.[index - 1] ?? text;
  });
  return `{${parts.join(", ")}}`;
}

export function subsetDegree(key: string): number {
  return key.split("+").length;
}

/** Every subset mentioned anywhere in the payload, by wire key. */
export function collectSubsetKeys(payload: ThetaPayload): Set<string> {
  const keys = new Set<string>(payload.unifying);
  for (const family of payload.families) {
    for (const key of family) keys.add(key);
  }
  return keys;
}

export function buildThetaVm(
  payload: ThetaPayload,
  version: number,
  previousKeys: ReadonlySet<string>,
  names: readonly string[] | null,
): ThetaVm {
  const chip = (key: string): SubsetChipVm => ({
    key,
    label: subsetLabel(key, names),
    degree: subsetDegree(key),
    isNew: !previousKeys.has(key),
  });
  const families = payload.families
    .filter((family) => family.length > 0)
    .map((family, index): FamilyCardVm => ({
      title: `family ${index + 1}`,
      chips: family.map(chip),
    }));
  return {
    version,
    families,
    unifying: payload.unifying.map(chip),
    empty: payload.unifying.length === 0,
  };
}
