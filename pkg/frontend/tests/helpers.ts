import type { SuggestRequest, SuggestResponse, Suggestion } from "../src/types.js";

export function deferred<T>() {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

export function suggestion(partial: Partial<Suggestion> & { canonical: string }): Suggestion {
  return {
    display: partial.canonical,
    score: 1.0,
    rank: 1,
    isEmpty: false,
    evidence: [],
    ...partial,
  };
}

export function response(heading: string, suggestions: Suggestion[]): SuggestResponse {
  return { entity: "E_x", heading, method: "ltr", k: suggestions.length, suggestions };
}

/** Scriptable stand-in for the API client: one deferred per suggest call. */
export class FakeClient {
  calls: SuggestRequest[] = [];
  pending: Array<ReturnType<typeof deferred<SuggestResponse>>> = [];
  tables: Record<string, unknown> = {};

  suggest(req: SuggestRequest): Promise<SuggestResponse> {
    this.calls.push(req);
    const d = deferred<SuggestResponse>();
    this.pending.push(d);
    return d.promise;
  }

  table(tableId: string): Promise<unknown> {
    if (tableId in this.tables) return Promise.resolve(this.tables[tableId]);
    return Promise.reject(new Error(`no fixture table ${tableId}`));
  }
}

export const SAMPLE = JSON.stringify({
  id: "t1",
  pageTitle: "sample",
  caption: "sample",
  headings: ["player", "caps", "nickname"],
  rows: [
    [{ text: "Player AA", entity: "E_p00" }, { text: "" }, { text: "" }],
    [{ text: "Player AB", entity: "E_p01" }, { text: "47" }, { text: "" }],
  ],
});

export async function flush(times = 3): Promise<void> {
  for (let i = 0; i < times; i += 1) {
    await Promise.resolve();
  }
}
