import type {
  Criterion,
  FacetCount,
  ResultPage,
  Suggestion,
} from "./types.js";
import { WEIGHT_STEPS } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderSuggestions(
  container: HTMLElement,
  suggestions: Suggestion[],
  onPick: (s: Suggestion) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const s of suggestions) {
    const item = el(doc, "li", `suggestion suggestion-${s.kind}`);
    item.appendChild(el(doc, "span", "suggestion-text", s.text));
    const hint = s.kind === "free_text" ? "free text" : (s.category ?? s.kind);
    item.appendChild(el(doc, "span", "suggestion-hint", hint));
    item.addEventListener("click", () => onPick(s));
    container.appendChild(item);
  }
}

function weightLabel(weight: number): string {
  if (weight === 1) return "must have";
  if (weight === 0) return "must not";
  return weight.toFixed(1);
}

function criterionLabel(c: Criterion): string {
  if (c.kind === "free_text") return `“${c.term}”`;
  if (c.kind === "numeric_range") return `${c.facet_id} ${c.lo}–${c.hi}`;
  return `${c.facet_id}: ${c.value}`;
}

export function renderCriteria(
  container: HTMLElement,
  criteria: Criterion[],
  onWeight: (criterionId: string, weight: number) => void,
  onRemove: (criterionId: string) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const c of criteria) {
    const row = el(doc, "div", "criterion");
    row.dataset.criterionId = c.criterion_id;
    row.appendChild(el(doc, "span", "criterion-label", criterionLabel(c)));

    const slider = el(doc, "input", "criterion-weight");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(WEIGHT_STEPS - 1);
    slider.step = "1";
    slider.value = String(Math.round(c.weight * (WEIGHT_STEPS - 1)));
    slider.addEventListener("change", () => {
      onWeight(c.criterion_id, Number(slider.value) / (WEIGHT_STEPS - 1));
    });
    row.appendChild(slider);

    row.appendChild(el(doc, "span", "criterion-weight-label", weightLabel(c.weight)));

    const remove = el(doc, "button", "criterion-remove", "×");
    remove.addEventListener("click", () => onRemove(c.criterion_id));
    row.appendChild(remove);
    container.appendChild(row);
  }
}

export function renderResults(
  container: HTMLElement,
  page: ResultPage,
  criteria: Criterion[],
  onSelect: (productId: string) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const labelFor = new Map(criteria.map((c) => [c.criterion_id, criterionLabel(c)]));
  for (const item of page.items) {
    const row = el(doc, "div", "result");
    row.dataset.productId = item.product_id;
    row.appendChild(el(doc, "span", "result-id", item.product_id));
    if (item.srs !== undefined) {
      row.appendChild(el(doc, "span", "result-srs", item.srs.toFixed(2)));
    }
    const badges = el(doc, "span", "result-badges");
    for (const pc of item.per_criterion ?? []) {
      const cls = pc.matched ? "badge badge-match" : "badge badge-miss";
      badges.appendChild(el(doc, "span", cls, labelFor.get(pc.criterion_id) ?? pc.criterion_id));
    }
    row.appendChild(badges);
    const pick = el(doc, "button", "result-select", "choose");
    pick.addEventListener("click", () => onSelect(item.product_id));
    row.appendChild(pick);
    container.appendChild(row);
  }
}

export function renderFacetCounts(
  container: HTMLElement,
  counts: FacetCount[],
  selected: { facet_id: string; value: string }[],
  onToggle: (facetId: string, value: string) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const isSelected = new Set(selected.map((f) => `${f.facet_id} ${f.value}`));
  const byFacet = new Map<string, FacetCount[]>();
  for (const c of counts) {
    const group = byFacet.get(c.facet_id) ?? [];
    group.push(c);
    byFacet.set(c.facet_id, group);
  }
  for (const [facetId, group] of [...byFacet.entries()].sort()) {
    const section = el(doc, "div", "facet-group");
    section.appendChild(el(doc, "h3", "facet-name", facetId));
    for (const c of group) {
      const row = el(doc, "label", "facet-value");
      const box = el(doc, "input");
      box.type = "checkbox";
      box.checked = isSelected.has(`${c.facet_id} ${c.value}`);
      box.addEventListener("change", () => onToggle(c.facet_id, c.value));
      row.appendChild(box);
      row.appendChild(el(doc, "span", "facet-value-text", c.value));
      row.appendChild(el(doc, "span", "facet-count", String(c.count)));
      section.appendChild(row);
    }
    container.appendChild(section);
  }
}
