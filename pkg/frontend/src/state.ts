/**
 * Session view state: a pure mirror of the latest service responses.
 *
 * All transitions take a service payload and return a new state; nothing
 * here predicts, scores, or re-derives options. The one piece of client
 * logic is the guard `canReport`, which checks a disclosure against the
 * options in the latest response so the UI never requests anything the
 * service did not offer.
 */

import type {
  FinalizedSession,
  OptionOffer,
  Prediction,
  ReportedPair,
  SessionOpened,
  SessionSnapshot,
} from "./types.js";

export interface SessionState {
  sessionId: string;
  finalized: boolean;
  /** Latest service preview; the only prediction the UI ever displays. */
  prediction: Prediction;
  /** Options from the latest response; the only options the UI ever renders. */
  options: OptionOffer[];
  /** Disclosures made so far, in reporting order (the breadcrumb). */
  reported: ReportedPair[];
  /** Set once finalize succeeds. */
  outcome: FinalizedSession | null;
  /** Latest inline error message, cleared by the next successful action. */
  error: string | null;
}

/** State for a freshly opened session. */
export function openedState(response: SessionOpened): SessionState {
  return {
    sessionId: response.session_id,
    finalized: false,
    prediction: response.prediction,
    options: response.options,
    reported: [],
    outcome: null,
    error: null,
  };
}

/** True iff some offered option includes this exact disclosure. */
export function canReport(state: SessionState, attribute: string, level: string): boolean {
  if (state.finalized) {
    return false;
  }
  return state.options.some((option) =>
    option.added.some((pair) => pair.attribute === attribute && pair.level === level),
  );
}

/** Fold in the response to a successful report of `pair`. */
export function withStep(
  state: SessionState,
  pair: ReportedPair,
  response: SessionSnapshot,
): SessionState {
  return {
    ...state,
    finalized: response.finalized,
    prediction: response.prediction,
    options: response.options,
    reported: [...state.reported, pair],
    error: null,
  };
}

/** Fold in a refreshed options/preview snapshot (no new disclosure). */
export function withSnapshot(state: SessionState, response: SessionSnapshot): SessionState {
  return {
    ...state,
    finalized: response.finalized,
    prediction: response.prediction,
    options: response.options,
    error: null,
  };
}

/** Fold in a successful finalization. */
export function withFinalized(state: SessionState, response: FinalizedSession): SessionState {
  return {
    ...state,
    finalized: true,
    prediction: response.prediction,
    options: [],
    outcome: response,
    error: null,
  };
}

/** Record an inline error without touching the mirrored service state. */
export function withError(state: SessionState, message: string): SessionState {
  return { ...state, error: message };
}
