/**
 * Workbench controller: orchestrates the service calls around the pure
 * state. At most one in-flight job per stage; a newer threshold commit
 * cancels the poll loop of the superseded job (the server job itself
 * finishes and lands in the cache).
 */

import { ApiClient, type JobStatus, type LdaRequestConfig } from "./api.js";
import { PollHandle, pollJob } from "./poll.js";
import {
  type WorkbenchState,
  canCondense,
  cloneGrid,
  editThreshold,
  hasUncommittedEdits,
  initialState,
} from "./state.js";

export class Workbench {
  state: WorkbenchState = initialState();
  private countsPoll: PollHandle | null = null;
  private topicsPoll: PollHandle | null = null;

  constructor(
    private api: ApiClient,
    private onChange: (state: WorkbenchState) => void = () => {},
    private pollIntervalMs = 400,
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  editThreshold(
    cls: Parameters<typeof editThreshold>[1],
    side: "left" | "right",
    value: number,
  ): ReturnType<typeof editThreshold> {
    const result = editThreshold(this.state, cls, side, value);
    if (!result.ok) {
      this.state.notice = result.error ?? "invalid threshold";
    }
    this.emit();
    return result;
  }

  hasUncommittedEdits(): boolean {
    return hasUncommittedEdits(this.state);
  }

  canCondense(): boolean {
    return canCondense(this.state);
  }

  /** Commit the grid: exactly one counts job, then refresh neighbors. */
  async commitThresholds(): Promise<void> {
    this.state.committed = cloneGrid(this.state.edited);
    this.state.notice = null;
    this.countsPoll?.cancel();
    if (this.state.neighbors !== null) {
      this.state.neighborsStale = true;
    }
    this.emit();

    const start = await this.api.startCountsJob(null, this.state.committed);
    this.state.countsJob = { id: start.jobId, status: "queued", progress: 0 };
    this.emit();
    const handle = new PollHandle();
    this.countsPoll = handle;
    const final = await pollJob(
      this.api,
      start.jobId,
      (status: JobStatus) => {
        this.state.countsJob = {
          id: status.job_id,
          status: status.status,
          progress: status.progress,
          ...(status.error !== undefined ? { error: status.error } : {}),
        };
        this.emit();
      },
      { handle, intervalMs: this.pollIntervalMs },
    );
    if (final === null) {
      return; // superseded by a newer commit
    }
    if (final.status === "done" && this.state.central) {
      await this.refreshNeighbors();
    }
    this.state.neighborsStale = false;
    this.emit();
  }

  async expand(central: string, k?: number): Promise<void> {
    this.state.central = central;
    if (k !== undefined) {
      this.state.k = k;
    }
    await this.refreshNeighbors();
  }

  private async refreshNeighbors(): Promise<void> {
    const result = await this.api.similar(this.state.central, this.state.k, {
      thresholds: this.state.committed,
    });
    this.state.neighbors = result.neighbors;
    this.state.neighborsStale = false;
    this.emit();
  }

  /** PATCH the flag; on network failure the toggle reverts with a notice. */
  async toggleNeighbor(word: string, included: boolean): Promise<void> {
    try {
      const updated = await this.api.setIncluded(this.state.central, word, included);
      this.state.neighbors = updated.neighbors;
    } catch {
      this.state.notice = `could not update "${word}"; change reverted`;
    }
    this.emit();
  }

  async condense(years: number[] | string | null = null): Promise<void> {
    if (!this.canCondense()) {
      return;
    }
    const stats = await this.api.condense(this.state.central, years);
    this.state.stats = stats;
    this.state.condensedId = stats.condensed_id;
    this.emit();
  }

  async drawTopics(config: LdaRequestConfig): Promise<void> {
    if (!this.state.condensedId) {
      this.state.notice = "condense first";
      this.emit();
      return;
    }
    this.topicsPoll?.cancel();
    const start = await this.api.startTopicsJob(this.state.condensedId, config);
    this.state.topicsJob = { id: start.jobId, status: "queued", progress: 0 };
    this.emit();
    const handle = new PollHandle();
    this.topicsPoll = handle;
    const final = await pollJob(
      this.api,
      start.jobId,
      (status: JobStatus) => {
        this.state.topicsJob = {
          id: status.job_id,
          status: status.status,
          progress: status.progress,
          ...(status.error !== undefined ? { error: status.error } : {}),
        };
        this.emit();
      },
      { handle, intervalMs: this.pollIntervalMs },
    );
    if (final?.status === "done" && final.result) {
      this.state.model = final.result as WorkbenchState["model"];
    }
    this.emit();
  }

  async loadFreqSeries(word: string, from: number, to: number): Promise<void> {
    this.state.freq = await this.api.seriesFreq(word, from, to);
    this.emit();
  }

  async loadSimSeries(
    word: string,
    base: number,
    from: number,
    to: number,
    mode: "base" | "adjacent" = "base",
  ): Promise<void> {
    this.state.sim = await this.api.seriesSim(word, base, from, to, mode);
    this.emit();
  }
}
