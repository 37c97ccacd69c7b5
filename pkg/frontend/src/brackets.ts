/** Distance brackets and their colors, identical to the engine's table. */

export const BRACKET_BOUNDS = [0.075, 0.1, 0.125, 0.15, 0.175, 0.2] as const;

export const BRACKET_COLORS = [
  "#EA4C3B",
  "#F0724B",
  "#F49265",
  "#F7AE83",
  "#F9C8A4",
  "#FADDC3",
  "#FFFFFF",
] as const;

export interface Bracket {
  index: number;
  lower: number;
  upper: number;
  color: string;
}

/** Bracket containing a distance; index counts the bounds passed. */
export function bracketOf(distance: number): Bracket {
  let index = 0;
  while (index < BRACKET_BOUNDS.length && distance >= BRACKET_BOUNDS[index]) {
    index += 1;
  }
  return {
    index,
    lower: index > 0 ? BRACKET_BOUNDS[index - 1] : 0,
    upper: index < BRACKET_BOUNDS.length ? BRACKET_BOUNDS[index] : Infinity,
    color: BRACKET_COLORS[index],
  };
}
