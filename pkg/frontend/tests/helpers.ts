import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { vi } from "vitest";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  const text = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(text) as T;
}

export interface Route {
  method: string;
  /** substring the request URL must contain */
  match: string;
  body: unknown;
  status?: number;
}

/** Install a fetch mock answering from recorded gateway payloads. */
export function mockFetch(routes: Route[]): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    for (const route of routes) {
      if (route.method === method && url.includes(route.match)) {
        return new Response(JSON.stringify(route.body), {
          status: route.status ?? 200,
          headers: { "content-type": "application/json" },
        });
      }
    }
    throw new Error(`no mock route for ${method} ${url}`);
  });
  vi.stubGlobal("fetch", mock);
  return mock;
}
