/**
 * Job polling with cancellation. Cancelling a handle only stops the
 * poll loop; the server-side job keeps running and lands in cache.
 */

import type { ApiClient, JobStatus } from "./api.js";

export class PollHandle {
  cancelled = false;

  cancel(): void {
    this.cancelled = true;
  }
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollJob(
  api: ApiClient,
  jobId: string,
  onUpdate: (status: JobStatus) => void,
  options: { handle?: PollHandle; intervalMs?: number; timeoutMs?: number } = {},
): Promise<JobStatus | null> {
  const handle = options.handle ?? new PollHandle();
  const interval = options.intervalMs ?? 400;
  const deadline = Date.now() + (options.timeoutMs ?? 10 * 60 * 1000);
  for (;;) {
    if (handle.cancelled) {
      return null;
    }
    const status = await api.getJob(jobId);
    if (handle.cancelled) {
      return null;
    }
    onUpdate(status);
    if (status.status === "done" || status.status === "failed") {
      return status;
    }
    if (Date.now() > deadline) {
      return status;
    }
    await sleep(interval);
  }
}
