// Shapes exchanged with the prefsearch HTTP API.

export type CriterionKind =
  | "nominal"
  | "geo"
  | "numeric_point"
  | "numeric_directed"
  | "numeric_range"
  | "free_text";

export interface Criterion {
  criterion_id: string;
  kind: CriterionKind;
  weight: number;
  facet_id?: string;
  value?: string;
  lo?: number;
  hi?: number;
  term?: string;
}

export interface QueryState {
  criteria: Criterion[];
}

export interface Suggestion {
  kind: "term" | "category" | "free_text";
  text: string;
  category?: string;
}

export interface PerCriterion {
  criterion_id: string;
  rs: number;
  matched: boolean;
}

export interface ResultItem {
  product_id: string;
  srs?: number;
  per_criterion?: PerCriterion[];
}

export interface ResultPage {
  page_index: number;
  page_size: number;
  total_count: number;
  items: ResultItem[];
}

export interface FacetCount {
  facet_id: string;
  value: string;
  count: number;
}

export type SortOrder = "relevance" | "price_asc" | "stars_desc" | "rating_desc";

export interface FacetSelectionState {
  selected: { facet_id: string; value: string }[];
  sort: SortOrder;
}

export type EngineName = "weighted" | "faceted";
