/** SVG rendering of the radial neighborhood and its interactions. */

import { radialLayout } from "./layout.js";
import { NeighborhoodPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ViewCallbacks {
  onSelect(cp: string): void;
  onExplain?(cp: string): void;
}

function el<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

/** Replace the container's content with the rendered neighborhood. */
export function renderNeighborhood(
  container: HTMLElement,
  payload: NeighborhoodPayload,
  callbacks: ViewCallbacks,
  size = 640,
): SVGSVGElement {
  const layout = radialLayout(payload.points, size);
  const svg = el("svg", {
    viewBox: `0 0 ${size} ${size}`,
    width: String(size),
    height: String(size),
    class: "neighborhood",
  });
  svg.dataset.scale = String(layout.scale);

  const [cx, cy] = layout.centerXY;
  for (const ring of layout.rings) {
    svg.appendChild(
      el("circle", {
        cx: String(cx),
        cy: String(cy),
        r: ring.radiusPx.toFixed(2),
        fill: "none",
        stroke: "#d8d8d8",
        "stroke-width": "1",
        class: "ring",
        "data-distance": ring.distance.toFixed(2),
      }),
    );
    const label = el("text", {
      x: (cx + ring.radiusPx).toFixed(2),
      y: String(cy - 4),
      "font-size": "10",
      fill: "#999",
      class: "ring-label",
    });
    label.textContent = ring.distance.toFixed(2);
    svg.appendChild(label);
  }

  const center = el("text", {
    x: String(cx),
    y: String(cy),
    "font-size": "30",
    "text-anchor": "middle",
    "dominant-baseline": "central",
    class: "center",
    "data-cp": payload.center.cp,
  });
  center.textContent = payload.center.char;
  svg.appendChild(center);

  for (const point of layout.points) {
    const group = el("g", {
      class: "kanji-point",
      "data-cp": point.cp,
      "data-distance": String(point.distance),
    });
    group.appendChild(
      el("circle", {
        cx: point.x.toFixed(2),
        cy: point.y.toFixed(2),
        r: "16",
        fill: point.color,
        opacity: "0.9",
      }),
    );
    const glyph = el("text", {
      x: point.x.toFixed(2),
      y: point.y.toFixed(2),
      "font-size": "22",
      "text-anchor": "middle",
      "dominant-baseline": "central",
    });
    glyph.textContent = point.char;
    group.appendChild(glyph);
    const tooltip = el("title", {});
    tooltip.textContent = `${point.char} - distance ${point.distance.toFixed(6)}`;
    group.appendChild(tooltip);
    group.addEventListener("click", (event) => {
      if ((event as MouseEvent).altKey && callbacks.onExplain) {
        callbacks.onExplain(point.cp);
      } else {
        callbacks.onSelect(point.cp);
      }
    });
    svg.appendChild(group);
  }

  container.replaceChildren(svg);
  return svg as SVGSVGElement;
}

/** Visible, dismissable error banner; the rest of the view stays put. */
export function renderError(container: HTMLElement, message: string): void {
  const existing = container.querySelector(".error-banner");
  existing?.remove();
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  container.prepend(banner);
}
