/** Application wiring: requests, breadcrumb, rendering, navigation. */

import { ApiError, NeighborhoodSource, RequestGate, ServerApi, StaticApi } from "./api.js";
import { Breadcrumb } from "./breadcrumb.js";
import { renderExplain } from "./explain.js";
import { NeighborhoodPayload, StaticLayout } from "./types.js";
import { renderError, renderNeighborhood } from "./view.js";

export interface AppOptions {
  api: NeighborhoodSource;
  root: HTMLElement;
  k: number;
}

export class ExplorerApp {
  readonly breadcrumb = new Breadcrumb();
  private gate = new RequestGate();
  private mapHost: HTMLElement;
  private trailHost: HTMLElement;

  constructor(private options: AppOptions) {
    this.mapHost = document.createElement("div");
    this.mapHost.className = "map-host";
    this.trailHost = document.createElement("nav");
    this.trailHost.className = "trail";
    options.root.replaceChildren(this.trailHost, this.mapHost);
  }

  /** Fetch and show a neighborhood; pushes the breadcrumb on success. */
  async navigateTo(cp: string): Promise<void> {
    const token = this.gate.issue();
    let payload: NeighborhoodPayload;
    try {
      payload = await this.options.api.loadNeighborhood(cp, this.options.k);
    } catch (err) {
      if (this.gate.isCurrent(token)) {
        renderError(this.options.root, err instanceof ApiError ? err.message : String(err));
      }
      return;
    }
    if (!this.gate.isCurrent(token)) {
      return; // a newer navigation superseded this response
    }
    this.breadcrumb.push(payload);
    this.show(payload);
  }

  /** Restore the previous view from the trail without refetching. */
  goBack(): boolean {
    const crumb = this.breadcrumb.back();
    if (!crumb) {
      return false;
    }
    this.gate.issue(); // orphan any in-flight request
    this.show(crumb.payload);
    return true;
  }

  private show(payload: NeighborhoodPayload): void {
    renderNeighborhood(this.mapHost, payload, {
      onSelect: (cp) => void this.navigateTo(cp),
      onExplain: (cp) => void this.explain(payload.center.cp, cp),
    });
    this.renderTrail();
  }

  private async explain(cp1: string, cp2: string): Promise<void> {
    if (!this.options.api.loadExplain) {
      renderError(this.options.root, "pair explanations need the local API server");
      return;
    }
    try {
      const payload = await this.options.api.loadExplain(cp1, cp2);
      renderExplain(this.options.root, payload);
    } catch (err) {
      renderError(this.options.root, String(err));
    }
  }

  private renderTrail(): void {
    const items = this.breadcrumb.entries().map((crumb, i) => {
      const button = document.createElement("button");
      button.className = "crumb";
      button.dataset.cp = crumb.cp;
      button.textContent = crumb.char;
      const stepsBack = this.breadcrumb.length - 1 - i;
      button.addEventListener("click", () => {
        for (let step = 0; step < stepsBack; step++) {
          this.goBack();
        }
      });
      return button;
    });
    this.trailHost.replaceChildren(...items);
  }
}

function parseQuery(): { api: string; start: string; k: number; layouts?: string } {
  const params = new URLSearchParams(window.location.search);
  return {
    api: params.get("api") ?? "http://127.0.0.1:8023",
    start: params.get("start") ?? "7c8b",
    k: Number(params.get("k") ?? "12"),
    layouts: params.get("layouts") ?? undefined,
  };
}

export async function boot(root: HTMLElement): Promise<ExplorerApp> {
  const query = parseQuery();
  let api: NeighborhoodSource;
  if (query.layouts) {
    const response = await fetch(query.layouts);
    const data = (await response.json()) as StaticLayout | StaticLayout[];
    api = StaticApi.fromLayouts(Array.isArray(data) ? data : [data]);
  } else {
    api = new ServerApi(query.api);
  }
  const app = new ExplorerApp({ api, root, k: query.k });
  await app.navigateTo(query.start);
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(document.getElementById("app") as HTMLElement);
}
