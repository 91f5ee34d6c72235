/**
 * REST client for the workbench service. Thin fetch wrapper: JSON in,
 * JSON out, non-2xx bodies surfaced as ServiceError with the service's
 * {code, message, detail} fields intact.
 */

import {
  ApplyResponse,
  ErrorBody,
  GenerateResponse,
  HealthResponse,
  MeshPayload,
  ParseResponse,
  StructuredCommand,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export interface SessionTicket {
  session_id: string;
  mesh: MeshPayload;
}

export class ServiceClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceError(0, "unreachable", `service unreachable: ${err}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const err = (payload ?? {}) as Partial<ErrorBody>;
      throw new ServiceError(
        response.status,
        err.code ?? "unknown_error",
        err.message ?? `request failed with status ${response.status}`,
        err.detail ?? null,
      );
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  createSessionFromModel(model: MeshPayload): Promise<SessionTicket> {
    return this.request("POST", "/sessions", { model });
  }

  createSyntheticSession(seed: number, types: string[]): Promise<SessionTicket> {
    return this.request("POST", "/sessions", { synthetic: { seed, types } });
  }

  parse(
    sessionId: string,
    text: string,
    engine: "grammar" | "llm" = "grammar",
  ): Promise<ParseResponse> {
    return this.request("POST", `/sessions/${sessionId}/parse`, {
      text,
      engine,
    });
  }

  generate(
    sessionId: string,
    seedFaceId: number,
    featureType: string,
  ): Promise<GenerateResponse> {
    return this.request("POST", `/sessions/${sessionId}/generate`, {
      seed_face_id: seedFaceId,
      feature_type: featureType,
    });
  }

  apply(
    sessionId: string,
    command: StructuredCommand,
    faceIds: number[],
  ): Promise<ApplyResponse> {
    return this.request("POST", `/sessions/${sessionId}/apply`, {
      command,
      face_ids: faceIds,
    });
  }

  undo(sessionId: string): Promise<{ mesh: MeshPayload }> {
    return this.request("POST", `/sessions/${sessionId}/undo`);
  }

  mesh(sessionId: string): Promise<{ mesh: MeshPayload }> {
    return this.request("GET", `/sessions/${sessionId}/mesh`);
  }
}
