import { ApiClient, nextRequestId } from "./api.js";
import { debounce } from "./debounce.js";
import {
  addCriterion,
  addPriceRange,
  criterionFromSuggestion,
  initialState,
  queryState,
  removeCriterion,
  setSort,
  setWeight,
  switchEngine,
  toggleFacet,
  type AppState,
} from "./state.js";
import {
  renderCriteria,
  renderFacetCounts,
  renderResults,
  renderSuggestions,
} from "./render.js";
import type { EngineName, SortOrder, Suggestion } from "./types.js";

export interface AppElements {
  searchInput: HTMLInputElement;
  suggestionList: HTMLElement;
  criteriaPanel: HTMLElement;
  resultList: HTMLElement;
  facetSidebar: HTMLElement;
  sortSelect: HTMLSelectElement;
  engineSwitch: HTMLSelectElement;
  moreButton: HTMLButtonElement;
  status: HTMLElement;
}

/** Wires the DOM to the HTTP API; owns the single source-of-truth state. */
export class App {
  state: AppState = initialState();
  sessionId: string | null = null;
  pagesShown = 1;
  private readonly debouncedSuggest: ((prefix: string) => void) & { cancel: () => void };

  constructor(
    private readonly api: ApiClient,
    private readonly els: AppElements,
  ) {
    this.debouncedSuggest = debounce((prefix: string) => {
      void this.loadSuggestions(prefix);
    }, 150);
    els.searchInput.addEventListener("input", () => {
      this.debouncedSuggest(els.searchInput.value);
    });
    els.sortSelect.addEventListener("change", () => {
      void this.applySort(els.sortSelect.value as SortOrder);
    });
    els.engineSwitch.addEventListener("change", () => {
      void this.start(els.engineSwitch.value as EngineName);
    });
    els.moreButton.addEventListener("click", () => {
      void this.showMore();
    });
  }

  async start(engine: EngineName = "weighted"): Promise<void> {
    this.state = switchEngine(this.state, engine);
    this.pagesShown = 1;
    const created = await this.api.createSession(engine);
    this.sessionId = created.session_id;
    this.els.status.textContent = `session ${created.session_id} (${engine})`;
    await this.refresh("AddTerm");
  }

  private async loadSuggestions(prefix: string): Promise<void> {
    if (!prefix) {
      this.els.suggestionList.replaceChildren();
      return;
    }
    const { suggestions } = await this.api.suggest(prefix);
    renderSuggestions(this.els.suggestionList, suggestions, (s) => {
      void this.accept(s);
    });
  }

  async accept(suggestion: Suggestion): Promise<void> {
    this.state = addCriterion(this.state, criterionFromSuggestion(this.state, suggestion));
    this.els.searchInput.value = "";
    this.els.suggestionList.replaceChildren();
    await this.refresh("AddTerm");
  }

  async acceptPriceRange(lo: number, hi: number): Promise<void> {
    this.state = addPriceRange(this.state, lo, hi);
    await this.refresh("AddTerm");
  }

  async changeWeight(criterionId: string, weight: number): Promise<void> {
    this.state = setWeight(this.state, criterionId, weight);
    await this.refresh("SetWeight");
  }

  async remove(criterionId: string): Promise<void> {
    this.state = removeCriterion(this.state, criterionId);
    await this.refresh("RemoveTerm");
  }

  async toggle(facetId: string, value: string): Promise<void> {
    const before = this.state.selection.selected.length;
    this.state = toggleFacet(this.state, facetId, value);
    const action =
      this.state.selection.selected.length > before ? "SelectFacet" : "DeselectFacet";
    await this.refresh(action);
  }

  async applySort(sort: SortOrder): Promise<void> {
    this.state = setSort(this.state, sort);
    await this.refresh("Sort");
  }

  async showMore(): Promise<void> {
    if (!this.sessionId) return;
    const { page } = await this.api.fetchPage(
      this.sessionId,
      this.pagesShown,
      nextRequestId(),
    );
    if (page.items.length > 0) {
      this.pagesShown += 1;
      renderResults(this.els.resultList, page, this.state.criteria, (pid) => {
        void this.choose(pid);
      });
    }
  }

  async choose(productId: string): Promise<void> {
    if (!this.sessionId) return;
    await this.api.selectProduct(this.sessionId, productId, nextRequestId());
    this.els.status.textContent = `selected ${productId} — session closed`;
    this.sessionId = null;
  }

  private async refresh(action: string): Promise<void> {
    if (!this.sessionId) return;
    this.pagesShown = 1;
    const requestId = nextRequestId();
    const { page } =
      this.state.engine === "weighted"
        ? await this.api.submitQuery(this.sessionId, queryState(this.state), action, requestId)
        : await this.api.submitSelection(this.sessionId, this.state.selection, action, requestId);
    renderResults(this.els.resultList, page, this.state.criteria, (pid) => {
      void this.choose(pid);
    });
    renderCriteria(
      this.els.criteriaPanel,
      this.state.criteria,
      (id, w) => void this.changeWeight(id, w),
      (id) => void this.remove(id),
    );
    if (this.state.engine === "faceted") {
      const { counts } = await this.api.facetCounts(this.sessionId);
      renderFacetCounts(this.els.facetSidebar, counts, this.state.selection.selected, (f, v) => {
        void this.toggle(f, v);
      });
    } else {
      this.els.facetSidebar.replaceChildren();
    }
  }
}

export function mount(doc: Document, api: ApiClient): App {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = doc.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
  };
  return new App(api, {
    searchInput: byId<HTMLInputElement>("search-input"),
    suggestionList: byId("suggestion-list"),
    criteriaPanel: byId("criteria-panel"),
    resultList: byId("result-list"),
    facetSidebar: byId("facet-sidebar"),
    sortSelect: byId<HTMLSelectElement>("sort-select"),
    engineSwitch: byId<HTMLSelectElement>("engine-switch"),
    moreButton: byId<HTMLButtonElement>("more-button"),
    status: byId("status"),
  });
}
