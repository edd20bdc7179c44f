import type {
  Dimension,
  ExportResponse,
  HumanDecision,
  Progress,
  ShortlistPage,
  VerdictResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'http_error';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    if (body.code) code = body.code;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body: keep the status line
  }
  return new ApiError(code, message, response.status);
}

export interface ShortlistQuery {
  dim?: Dimension;
  cursor?: string;
  limit?: number;
  coder?: string;
}

/** Thin typed client over the review service JSON API. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly token: string | null = null,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError('network_error', String(err), 0);
    }
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  async listSessions(): Promise<string[]> {
    const body = await this.request<{ sessions: string[] }>('/api/sessions', {
      headers: this.headers(),
    });
    return body.sessions;
  }

  async getShortlist(sessionId: string, query: ShortlistQuery = {}): Promise<ShortlistPage> {
    const params = new URLSearchParams();
    if (query.dim) params.set('dim', query.dim);
    if (query.cursor) params.set('cursor', query.cursor);
    if (query.limit) params.set('limit', String(query.limit));
    if (query.coder) params.set('coder', query.coder);
    const suffix = params.toString() ? `?${params}` : '';
    return this.request<ShortlistPage>(
      `/api/sessions/${encodeURIComponent(sessionId)}/shortlist${suffix}`,
      { headers: this.headers() },
    );
  }

  async getProgress(sessionId: string): Promise<Progress> {
    const body = await this.request<{ progress: Progress }>(
      `/api/sessions/${encodeURIComponent(sessionId)}/progress`,
      { headers: this.headers() },
    );
    return body.progress;
  }

  async postVerdict(
    sessionId: string,
    paraId: string,
    dimension: Dimension,
    decision: HumanDecision,
    coderId: string,
  ): Promise<VerdictResponse> {
    return this.request<VerdictResponse>(
      `/api/sessions/${encodeURIComponent(sessionId)}/verdicts`,
      {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify({
          para_id: paraId,
          dimension,
          decision,
          coder_id: coderId,
        }),
      },
    );
  }

  async postExport(sessionId: string, path?: string): Promise<ExportResponse> {
    return this.request<ExportResponse>(
      `/api/sessions/${encodeURIComponent(sessionId)}/export`,
      {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify(path ? { path } : {}),
      },
    );
  }
}
