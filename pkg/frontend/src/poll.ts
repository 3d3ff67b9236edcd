/** Search status polling: 1s cadence, multiplicative backoff, 10s cap. */

import type { GatewayClient } from "./api.js";
import type { SearchStatus } from "./types.js";

export interface PollOptions {
  initialDelayMs?: number;
  backoffFactor?: number;
  maxDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollSearch(
  client: GatewayClient,
  searchId: string,
  onStatus: (status: SearchStatus) => void,
  options: PollOptions = {},
): Promise<SearchStatus> {
  const initial = options.initialDelayMs ?? 1000;
  const factor = options.backoffFactor ?? 1.5;
  const cap = options.maxDelayMs ?? 10_000;
  const sleep = options.sleep ?? defaultSleep;

  let delay = initial;
  for (;;) {
    const status = await client.searchStatus(searchId);
    onStatus(status);
    if (status.state === "done" || status.state === "failed") return status;
    await sleep(delay);
    delay = Math.min(delay * factor, cap);
  }
}
