/** Pair-explanation overlay: matched components, weights and penalty. */

import { ExplainPayload } from "./types.js";

const LINK_COLORS = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"];

export function renderExplain(container: HTMLElement, payload: ExplainPayload): HTMLElement {
  const overlay = document.createElement("div");
  overlay.className = "explain-overlay";

  const heading = document.createElement("h2");
  const [a, b] = payload.kanji;
  heading.textContent = `${a.char} vs ${b.char} - distance ${payload.distance.toFixed(6)}`;
  overlay.appendChild(heading);

  if (payload.pairs.length === 0) {
    const note = document.createElement("p");
    note.className = "no-match";
    note.textContent = `no components matched, distance = ${payload.a}`;
    overlay.appendChild(note);
  } else {
    const table = document.createElement("table");
    table.className = "pairs";
    const head = document.createElement("tr");
    for (const caption of ["", a.char, b.char, "pair weight", "component distance"]) {
      const cell = document.createElement("th");
      cell.textContent = caption;
      head.appendChild(cell);
    }
    table.appendChild(head);
    payload.pairs.forEach((pair, i) => {
      const row = document.createElement("tr");
      row.className = "pair";
      row.dataset.from = pair.from.join(",");
      row.dataset.to = pair.to.join(",");
      const swatch = document.createElement("td");
      swatch.style.background = LINK_COLORS[i % LINK_COLORS.length];
      swatch.className = "swatch";
      row.appendChild(swatch);
      for (const text of [
        pair.labels[0] ?? `(${pair.from.join(",")})`,
        pair.labels[1] ?? `(${pair.to.join(",")})`,
        pair.mu_weight.toFixed(4),
        pair.rho.toFixed(4),
      ]) {
        const cell = document.createElement("td");
        cell.textContent = text;
        row.appendChild(cell);
      }
      table.appendChild(row);
    });
    overlay.appendChild(table);
  }

  const footer = document.createElement("p");
  footer.className = "unmatched";
  const penalty = payload.a * Math.max(0, payload.unmatched_weight);
  footer.textContent =
    `unmatched weight ${payload.unmatched_weight.toFixed(4)} ` +
    `-> penalty ${penalty.toFixed(6)}`;
  overlay.appendChild(footer);

  const close = document.createElement("button");
  close.textContent = "close";
  close.addEventListener("click", () => overlay.remove());
  overlay.appendChild(close);

  container.appendChild(overlay);
  return overlay;
}
