/**
 * Wire types for the participatory-system session service.
 *
 * These mirror the HTTP contract exactly; the UI derives all of its state
 * from these payloads and never computes predictions or gains on its own.
 */

/** One disclosed (attribute, level) pair, e.g. sex=female. */
export interface ReportedPair {
  attribute: string;
  level: string;
}

/** Certified out-of-sample gain attached to a reporting option. */
export interface GainInfo {
  metric: string;
  /** Risk reduction in metric units (0.215 means 21.5 percentage points). */
  gain: number;
  p_value: number;
  n_validation: number;
}

/** A reporting option offered by the service at the current session node. */
export interface OptionOffer {
  /** Target node as level names, one slot per attribute (null = unreported). */
  node: (string | null)[];
  /** Disclosures this option adds, in the order they should be reported. */
  added: ReportedPair[];
  gain: GainInfo | null;
}

/** Prediction preview; always produced server-side. */
export interface Prediction {
  score: number;
  label: number;
  /** Serving node as level names (null = unreported slot). */
  node: (string | null)[];
  model_id: string;
}

/** Response to POST /sessions. */
export interface SessionOpened {
  session_id: string;
  prediction: Prediction;
  options: OptionOffer[];
}

/** Response to GET .../options and POST .../report. */
export interface SessionSnapshot {
  session_id: string;
  finalized: boolean;
  prediction: Prediction;
  options: OptionOffer[];
}

/** One step of the provenance chain returned at finalization. */
export interface CertificateLink {
  node: (string | null)[];
  model_id: string;
  /** null at the root (the opt-out baseline has nothing to certify against). */
  gain: GainInfo | null;
}

/** Response to POST .../finalize. */
export interface FinalizedSession {
  session_id: string;
  finalized: boolean;
  prediction: Prediction;
  serving_node: (string | null)[];
  model_id: string;
  certificate_chain: CertificateLink[];
}

/** One categorical attribute in the public schema. */
export interface AttributeSchema {
  name: string;
  levels: string[];
}

/** One node of the public reporting tree (GET /system). */
export interface TreeNodeView {
  /** Level indices into schema.attributes[i].levels; null = unreported. */
  entries: (number | null)[];
  /** Parent node's entries, or null for the root. */
  parent: (number | null)[] | null;
  model_id: string;
  surviving: boolean;
  certificate: GainInfo | null;
  n_assign: number;
  assign_risk: number;
  n_prune: number;
  prune_risk: number;
}

/** Public model descriptor (no parameters are ever exposed). */
export interface ModelView {
  id: string;
  kind: string;
  model_class: string;
  required_attributes: number[];
}

/** Public system document (GET /system). */
export interface SystemView {
  format_version: number;
  artifact: string;
  name: string;
  kind: string;
  metric: string;
  alpha: number;
  selected: boolean;
  schema: { attributes: AttributeSchema[] };
  feature_names: string[];
  tree: { kind: string; nodes: TreeNodeView[] };
  models: ModelView[];
  provenance: Record<string, unknown>;
}

/** Response to GET /health. */
export interface HealthView {
  status: string;
  system: string;
}
