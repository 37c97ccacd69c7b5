/** Wire types of the /v1 JSON API and the exported layout files. */

export interface KanjiRef {
  cp: string; // zero-padded lowercase hex codepoint
  char: string;
}

export interface FocusedPoint {
  cp: string;
  char: string;
  r: number;
  theta: number;
  distance: number;
  bracket: number;
  color: string;
}

export interface NeighborhoodPayload {
  center: KanjiRef;
  points: FocusedPoint[];
}

/** Static export of the map command: {center, points:[{cp, r, theta}]}. */
export interface StaticLayout {
  center: string;
  points: { cp: string; r: number; theta: number }[];
}

export interface MatchedPairPayload {
  from: [number, number];
  to: [number, number];
  mu_weight: number;
  rho: number;
  labels: (string | null)[];
}

export interface ComponentInfo {
  index: [number, number];
  label: string | null;
  strokes: number[];
}

export interface ExplainPayload {
  kanji: KanjiRef[];
  pairs: MatchedPairPayload[];
  unmatched_weight: number;
  distance: number;
  a: number;
  components: Record<string, ComponentInfo[]>;
}

export function charOf(cpHex: string): string {
  return String.fromCodePoint(parseInt(cpHex, 16));
}
