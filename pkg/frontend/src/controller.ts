/**
 * Session controller: the async glue between the service client and the
 * view state. Every action ends by handing the new state to `notify`, so a
 * caller can re-render after each service round-trip.
 *
 * Guarantees:
 *  - a report request is only issued for a disclosure present in the latest
 *    options response (checked again before every single request);
 *  - the displayed prediction is always the latest service preview;
 *  - service errors become inline messages on the state, never exceptions.
 */

import { ServiceClient, ServiceError } from "./api.js";
import {
  canReport,
  openedState,
  withError,
  withFinalized,
  withStep,
  type SessionState,
} from "./state.js";
import type { ReportedPair } from "./types.js";

export class SessionController {
  state: SessionState | null = null;

  constructor(
    private readonly api: ServiceClient,
    private readonly notify: (state: SessionState | null) => void = () => {},
  ) {}

  private emit(state: SessionState | null): SessionState | null {
    this.state = state;
    this.notify(state);
    return state;
  }

  private fail(message: string): SessionState | null {
    return this.emit(this.state === null ? null : withError(this.state, message));
  }

  private messageOf(exc: unknown): string {
    if (exc instanceof ServiceError) {
      return exc.message;
    }
    return exc instanceof Error ? exc.message : String(exc);
  }

  /** Open a session for one feature vector. */
  async start(features: number[]): Promise<SessionState | null> {
    try {
      const response = await this.api.createSession(features);
      return this.emit(openedState(response));
    } catch (exc) {
      return this.fail(this.messageOf(exc));
    }
  }

  /**
   * Disclose one (attribute, level) pair. Refuses locally — without any
   * request — when the pair is not part of a currently offered option.
   */
  async reportOne(attribute: string, level: string): Promise<SessionState | null> {
    if (this.state === null) {
      return null;
    }
    if (this.state.finalized) {
      return this.fail("the session is finalized; no further reporting is possible");
    }
    if (!canReport(this.state, attribute, level)) {
      return this.fail(`${attribute}=${level} is not one of the offered options`);
    }
    const pair: ReportedPair = { attribute, level };
    try {
      const response = await this.api.report(this.state.sessionId, attribute, level);
      return this.emit(withStep(this.state, pair, response));
    } catch (exc) {
      return this.fail(this.messageOf(exc));
    }
  }

  /**
   * Report every disclosure of the option currently at `index`, one request
   * at a time, re-validating each pair against the latest options response.
   */
  async chooseOption(index: number): Promise<SessionState | null> {
    if (this.state === null) {
      return null;
    }
    const option = this.state.options[index];
    if (option === undefined) {
      return this.fail("that option is no longer offered");
    }
    const plan = [...option.added];
    for (const pair of plan) {
      const before = this.state;
      const after = await this.reportOne(pair.attribute, pair.level);
      if (after === null || after.error !== null || after === before) {
        break;
      }
    }
    return this.state;
  }

  /** Stop reporting and take the prediction for what was shared so far. */
  async finalize(): Promise<SessionState | null> {
    if (this.state === null) {
      return null;
    }
    if (this.state.finalized) {
      return this.fail("the session is already finalized");
    }
    try {
      const response = await this.api.finalize(this.state.sessionId);
      return this.emit(withFinalized(this.state, response));
    } catch (exc) {
      return this.fail(this.messageOf(exc));
    }
  }

  /** Drop the current session view (e.g. to start over). */
  reset(): void {
    this.emit(null);
  }
}
