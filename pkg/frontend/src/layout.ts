/** Screen geometry for the radial neighborhood view. */

import { FocusedPoint } from "./types.js";

export const RING_STEP = 0.05; // distance per ring, matching the map export

export interface ScreenPoint {
  cp: string;
  char: string;
  x: number;
  y: number;
  distance: number;
  color: string;
}

export interface RadialLayout {
  size: number;
  centerXY: [number, number];
  scale: number; // screen pixels per unit distance; radius = distance * scale
  rings: { radiusPx: number; distance: number }[];
  points: ScreenPoint[];
}

/** Lay the polar points out on a square canvas with rings at fixed steps. */
export function radialLayout(points: FocusedPoint[], size: number, margin = 40): RadialLayout {
  const maxR = points.reduce((acc, p) => Math.max(acc, p.r), RING_STEP);
  const ringCount = Math.ceil(maxR / RING_STEP - 1e-12);
  const scale = (size / 2 - margin) / (ringCount * RING_STEP);
  const cx = size / 2;
  const cy = size / 2;
  const rings = [];
  for (let k = 1; k <= ringCount; k++) {
    rings.push({ radiusPx: k * RING_STEP * scale, distance: k * RING_STEP });
  }
  return {
    size,
    centerXY: [cx, cy],
    scale,
    rings,
    points: points.map((p) => ({
      cp: p.cp,
      char: p.char,
      x: cx + p.r * scale * Math.cos(p.theta),
      y: cy + p.r * scale * Math.sin(p.theta),
      distance: p.distance,
      color: p.color,
    })),
  };
}
