/** API client: server mode against /v1, or static-file mode from exports.
 *
 * The client never computes anything numerically; every distance and
 * angle comes from the backend or the exported layout files. At most
 * one neighborhood request is in flight; responses arriving for an
 * outdated request are discarded via a monotonically increasing token.
 */

import {
  ExplainPayload,
  NeighborhoodPayload,
  StaticLayout,
  charOf,
} from "./types.js";
import { bracketOf } from "./brackets.js";

export class ApiError extends Error {}

export interface NeighborhoodSource {
  loadNeighborhood(cp: string, k: number): Promise<NeighborhoodPayload>;
  loadExplain?(cp1: string, cp2: string): Promise<ExplainPayload>;
}

export class ServerApi implements NeighborhoodSource {
  constructor(
    private base: string,
    private fetcher: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async get(path: string): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetcher(this.base + path);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(`${path} -> ${response.status}`);
    }
    return response.json();
  }

  loadNeighborhood(cp: string, k: number): Promise<NeighborhoodPayload> {
    return this.get(`/v1/kanji/${cp}/focused?k=${k}`) as Promise<NeighborhoodPayload>;
  }

  loadExplain(cp1: string, cp2: string): Promise<ExplainPayload> {
    return this.get(`/v1/pair/${cp1}/${cp2}/explain`) as Promise<ExplainPayload>;
  }
}

/** Serves pre-exported focused layouts; no backend required. */
export class StaticApi implements NeighborhoodSource {
  constructor(private layouts: Map<string, StaticLayout>) {}

  static fromLayouts(layouts: StaticLayout[]): StaticApi {
    return new StaticApi(new Map(layouts.map((l) => [l.center, l])));
  }

  async loadNeighborhood(cp: string, k: number): Promise<NeighborhoodPayload> {
    const layout = this.layouts.get(cp);
    if (!layout) {
      throw new ApiError(`no exported layout for ${cp}`);
    }
    const points = layout.points.slice(0, k).map((p) => ({
      cp: p.cp,
      char: charOf(p.cp),
      r: p.r,
      theta: p.theta,
      distance: p.r,
      bracket: bracketOf(p.r).index,
      color: bracketOf(p.r).color,
    }));
    return { center: { cp, char: charOf(cp) }, points };
  }
}

/** Single-flight guard: stale responses never reach the caller. */
export class RequestGate {
  private token = 0;

  issue(): number {
    this.token += 1;
    return this.token;
  }

  isCurrent(token: number): boolean {
    return token === this.token;
  }
}
