/**
 * Frozen service payloads for the 101-row clinic demonstration artifact
 * (minimal system, pruning level 0.10, seed 7), captured verbatim from the
 * session service. The integration suite re-derives these from a live
 * server and asserts they still match byte for byte.
 */

import type {
  FinalizedSession,
  GainInfo,
  SessionOpened,
  SessionSnapshot,
  SystemView,
} from "../src/types.js";

/** The certified p-value both surviving clinic options carry. */
export const CLINIC_P_VALUE = 7.933281519755948e-7;

export const CLINIC_GAIN: GainInfo = {
  metric: "error",
  gain: 1.0,
  p_value: CLINIC_P_VALUE,
  n_validation: 25,
};

export const CLINIC_FEATURES = [0.25];

export const openedResponse: SessionOpened = {
  session_id: "8e033aaa1d7a4aea9b178bd04b3e8884",
  prediction: { score: 0.0, label: 0, node: [null, null], model_id: "clinic_baseline" },
  options: [
    {
      node: ["female", "young"],
      added: [
        { attribute: "sex", level: "female" },
        { attribute: "age_group", level: "young" },
      ],
      gain: { ...CLINIC_GAIN },
    },
    {
      node: ["male", "old"],
      added: [
        { attribute: "sex", level: "male" },
        { attribute: "age_group", level: "old" },
      ],
      gain: { ...CLINIC_GAIN },
    },
  ],
};

export const afterSexFemale: SessionSnapshot = {
  session_id: "8e033aaa1d7a4aea9b178bd04b3e8884",
  finalized: false,
  prediction: { score: 0.0, label: 0, node: [null, null], model_id: "clinic_baseline" },
  options: [
    {
      node: ["female", "young"],
      added: [{ attribute: "age_group", level: "young" }],
      gain: { ...CLINIC_GAIN },
    },
  ],
};

export const afterAgeYoung: SessionSnapshot = {
  session_id: "8e033aaa1d7a4aea9b178bd04b3e8884",
  finalized: false,
  prediction: {
    score: 1.0,
    label: 1,
    node: ["female", "young"],
    model_id: "clinic_personalized",
  },
  options: [],
};

export const finalizedPersonalized: FinalizedSession = {
  session_id: "8e033aaa1d7a4aea9b178bd04b3e8884",
  finalized: true,
  prediction: {
    score: 1.0,
    label: 1,
    node: ["female", "young"],
    model_id: "clinic_personalized",
  },
  serving_node: ["female", "young"],
  model_id: "clinic_personalized",
  certificate_chain: [
    { node: [null, null], model_id: "clinic_baseline", gain: null },
    { node: ["female", "young"], model_id: "clinic_personalized", gain: { ...CLINIC_GAIN } },
  ],
};

export const finalizedBaseline: FinalizedSession = {
  session_id: "507dacaa17fc44ddb4fb3d12bdfe4d70",
  finalized: true,
  prediction: { score: 0.0, label: 0, node: [null, null], model_id: "clinic_baseline" },
  serving_node: [null, null],
  model_id: "clinic_baseline",
  certificate_chain: [{ node: [null, null], model_id: "clinic_baseline", gain: null }],
};

export const clinicSystemView: SystemView = {
  format_version: 1,
  artifact: "participatory_system",
  name: "minimal",
  kind: "minimal",
  metric: "error",
  alpha: 0.1,
  selected: false,
  schema: {
    attributes: [
      { name: "sex", levels: ["female", "male"] },
      { name: "age_group", levels: ["old", "young"] },
    ],
  },
  feature_names: ["biomarker"],
  tree: {
    kind: "minimal",
    nodes: [
      {
        entries: [null, null],
        parent: null,
        model_id: "clinic_baseline",
        surviving: true,
        certificate: null,
        n_assign: 101,
        assign_risk: 0.49504950495049505,
        n_prune: 101,
        prune_risk: 0.49504950495049505,
      },
      {
        entries: [0, 0],
        parent: [null, null],
        model_id: "clinic_baseline",
        surviving: false,
        certificate: { metric: "error", gain: 0.0, p_value: 1.0, n_validation: 24 },
        n_assign: 24,
        assign_risk: 0.0,
        n_prune: 24,
        prune_risk: 0.0,
      },
      {
        entries: [0, 1],
        parent: [null, null],
        model_id: "clinic_personalized",
        surviving: true,
        certificate: { ...CLINIC_GAIN },
        n_assign: 25,
        assign_risk: 0.0,
        n_prune: 25,
        prune_risk: 0.0,
      },
      {
        entries: [1, 0],
        parent: [null, null],
        model_id: "clinic_personalized",
        surviving: true,
        certificate: { ...CLINIC_GAIN },
        n_assign: 25,
        assign_risk: 0.0,
        n_prune: 25,
        prune_risk: 0.0,
      },
      {
        entries: [1, 1],
        parent: [null, null],
        model_id: "clinic_baseline",
        surviving: false,
        certificate: { metric: "error", gain: 0.0, p_value: 1.0, n_validation: 27 },
        n_assign: 27,
        assign_risk: 0.0,
        n_prune: 27,
        prune_risk: 0.0,
      },
    ],
  },
  models: [
    { id: "clinic_baseline", kind: "fixed", model_class: "fixed_rule", required_attributes: [] },
    {
      id: "clinic_personalized",
      kind: "fixed",
      model_class: "fixed_rule",
      required_attributes: [0, 1],
    },
  ],
  provenance: {
    dataset_hash: {
      assign: "44cdd658a2369232a0a389c25795081ba48ff8fd8fb2f7c1a2a2d630daf0a994",
      prune: "44cdd658a2369232a0a389c25795081ba48ff8fd8fb2f7c1a2a2d630daf0a994",
      test: "44cdd658a2369232a0a389c25795081ba48ff8fd8fb2f7c1a2a2d630daf0a994",
    },
    seed: 7,
    toolkit_version: "0.1.0",
    shared_assign_prune: true,
  },
};

/** A system whose tree is the root alone: only opting out is possible. */
export const rootOnlySystemView: SystemView = {
  ...clinicSystemView,
  name: "root_only",
  tree: {
    kind: "minimal",
    nodes: [clinicSystemView.tree.nodes[0]!],
  },
};

/** A depth-two tree (one attribute, then the second) for structure checks. */
export const sequentialSystemView: SystemView = {
  ...clinicSystemView,
  name: "stepwise",
  kind: "sequential",
  tree: {
    kind: "sequential",
    nodes: [
      {
        entries: [null, null],
        parent: null,
        model_id: "clinic_baseline",
        surviving: true,
        certificate: null,
        n_assign: 101,
        assign_risk: 0.49504950495049505,
        n_prune: 101,
        prune_risk: 0.49504950495049505,
      },
      {
        entries: [0, null],
        parent: [null, null],
        model_id: "clinic_baseline",
        surviving: true,
        certificate: { metric: "error", gain: 0.245, p_value: 0.002, n_validation: 49 },
        n_assign: 49,
        assign_risk: 0.3,
        n_prune: 49,
        prune_risk: 0.3,
      },
      {
        entries: [0, 1],
        parent: [0, null],
        model_id: "clinic_personalized",
        surviving: true,
        certificate: { metric: "error", gain: 0.3, p_value: 0.001, n_validation: 25 },
        n_assign: 25,
        assign_risk: 0.0,
        n_prune: 25,
        prune_risk: 0.0,
      },
      {
        entries: [0, 0],
        parent: [0, null],
        model_id: "clinic_baseline",
        surviving: false,
        certificate: { metric: "error", gain: 0.0, p_value: 1.0, n_validation: 24 },
        n_assign: 24,
        assign_risk: 0.0,
        n_prune: 24,
        prune_risk: 0.0,
      },
    ],
  },
};

/** Snapshot with no remaining options on a live, unfinalized session. */
export const rootOnlySnapshot: SessionSnapshot = {
  session_id: "507dacaa17fc44ddb4fb3d12bdfe4d70",
  finalized: false,
  prediction: { score: 0.0, label: 0, node: [null, null], model_id: "clinic_baseline" },
  options: [],
};
