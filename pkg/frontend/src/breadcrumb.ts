/** Trail of visited centers with cached views for refetch-free back. */

import { NeighborhoodPayload } from "./types.js";

export interface Crumb {
  cp: string;
  char: string;
  payload: NeighborhoodPayload;
}

export class Breadcrumb {
  private trail: Crumb[] = [];

  push(payload: NeighborhoodPayload): void {
    this.trail.push({ cp: payload.center.cp, char: payload.center.char, payload });
  }

  /** Drop the current view and return the previous one, if any. */
  back(): Crumb | undefined {
    if (this.trail.length < 2) {
      return undefined;
    }
    this.trail.pop();
    return this.trail[this.trail.length - 1];
  }

  current(): Crumb | undefined {
    return this.trail[this.trail.length - 1];
  }

  entries(): readonly Crumb[] {
    return this.trail;
  }

  get length(): number {
    return this.trail.length;
  }
}
