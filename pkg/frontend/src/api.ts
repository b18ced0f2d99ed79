/** Typed client for the simulation service. All physics stays server-side. */

import type {
  CircuitJson,
  GateDescriptor,
  SimulateRequest,
  SimulateResponse,
  VqeEvent,
  VqeRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(response: Response): Promise<never> {
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    /* non-JSON error body; keep the status line */
  }
  throw new ApiError(response.status, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  async gates(): Promise<GateDescriptor[]> {
    const response = await this.fetchImpl(this.url("/gates"));
    if (!response.ok) await raiseForStatus(response);
    const body = (await response.json()) as { gates: GateDescriptor[] };
    return body.gates;
  }

  async fixtures(): Promise<Record<string, CircuitJson>> {
    const response = await this.fetchImpl(this.url("/fixtures"));
    if (!response.ok) await raiseForStatus(response);
    return (await response.json()) as Record<string, CircuitJson>;
  }

  async simulate(request: SimulateRequest): Promise<SimulateResponse> {
    const response = await this.fetchImpl(this.url("/simulate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!response.ok) await raiseForStatus(response);
    return (await response.json()) as SimulateResponse;
  }

  /**
   * Stream a VQE run as parsed server-sent events. Abort the signal to
   * stop the run (the server tears down when the connection closes).
   */
  async *vqeStream(
    request: VqeRequest,
    signal?: AbortSignal,
  ): AsyncGenerator<VqeEvent> {
    const response = await this.fetchImpl(this.url("/vqe/factor"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    if (!response.ok) await raiseForStatus(response);
    if (!response.body) throw new ApiError(0, "response has no body stream");
    yield* parseSseStream(response.body);
  }
}

/** Incremental SSE parser over a byte stream; framework-free. */
export async function* parseSseStream(
  stream: ReadableStream<Uint8Array>,
): AsyncGenerator<VqeEvent> {
  const decoder = new TextDecoder();
  const reader = stream.getReader();
  let buffer = "";
  try {
    for (;;) {
      const { value, done } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let boundary: number;
      while ((boundary = buffer.indexOf("\n\n")) >= 0) {
        const block = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        const event = parseSseBlock(block);
        if (event) yield event;
      }
    }
    const tail = parseSseBlock(buffer);
    if (tail) yield tail;
  } finally {
    reader.releaseLock();
  }
}

export function parseSseBlock(block: string): VqeEvent | null {
  let name = "message";
  let data = "";
  for (const line of block.split("\n")) {
    if (line.startsWith("event: ")) name = line.slice("event: ".length);
    else if (line.startsWith("data: ")) data += line.slice("data: ".length);
  }
  if (!data) return null;
  const parsed = JSON.parse(data);
  if (name === "result") return { kind: "result", data: parsed };
  if (name === "error") return { kind: "error", message: parsed.error };
  return { kind: "iteration", data: parsed };
}
