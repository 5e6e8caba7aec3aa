import type {
  AlbumUploadResponse,
  ChatResponse,
  GalleryMode,
  GalleryPage,
  ImageSearchResponse,
  TextSearchResponse,
  TokenResponse,
} from "./types";

/** A failed API call; `code` is the service's machine_code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export interface ApiClientOptions {
  baseUrl: string;
  fetchImpl?: typeof fetch;
  token?: string | null;
}

/** Thin typed wrapper over the service's JSON API.
 *
 * Every network effect of the UI goes through this class; nothing else
 * in the front-end touches fetch directly.
 */
export class ApiClient {
  readonly baseUrl: string;
  token: string | null;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ApiClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.token = options.token ?? null;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  /** Absolute form of a possibly service-relative URI (e.g. /payloads/x). */
  resolveUri(uri: string): string {
    if (/^https?:\/\//.test(uri)) return uri;
    if (!this.baseUrl) return uri;
    return this.baseUrl + (uri.startsWith("/") ? uri : `/${uri}`);
  }

  private headers(): Record<string, string> {
    return this.token ? { authorization: `Bearer ${this.token}` } : {};
  }

  private async request<T>(method: string, path: string, init: {
    json?: unknown;
    form?: FormData;
  } = {}): Promise<T> {
    const headers = this.headers();
    let body: BodyInit | undefined;
    if (init.json !== undefined) {
      headers["content-type"] = "application/json";
      body = JSON.stringify(init.json);
    } else if (init.form !== undefined) {
      body = init.form;
    }
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers,
        body,
      });
    } catch (err) {
      throw new ApiError(0, "network", `cannot reach the service: ${err}`);
    }
    if (!response.ok) {
      let code = "internal";
      let detail = `request failed with status ${response.status}`;
      try {
        const parsed = (await response.json()) as {
          detail?: string;
          machine_code?: string;
        };
        if (parsed.machine_code) code = parsed.machine_code;
        if (parsed.detail) detail = parsed.detail;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  searchText(query: string, mode: GalleryMode, k: number):
      Promise<TextSearchResponse> {
    return this.request("POST", "/search/text", { json: { query, mode, k } });
  }

  searchImage(bytes: Uint8Array, filename: string, k: number):
      Promise<ImageSearchResponse> {
    const form = new FormData();
    form.append("image", new Blob([bytes as BlobPart]), filename);
    return this.request("POST", `/search/image?k=${k}`, { form });
  }

  chat(message: string, sessionId: string | null, imagesBase64: string[]):
      Promise<ChatResponse> {
    const payload: Record<string, unknown> = {
      message,
      images_base64: imagesBase64,
    };
    if (sessionId !== null) payload["session_id"] = sessionId;
    return this.request("POST", "/chat", { json: payload });
  }

  galleryItems(mode: GalleryMode, page: number, pageSize: number):
      Promise<GalleryPage> {
    return this.request(
      "GET", `/gallery/${mode}/items?page=${page}&page_size=${pageSize}`);
  }

  albumUpload(bytes: Uint8Array, filename: string):
      Promise<AlbumUploadResponse> {
    const form = new FormData();
    form.append("image", new Blob([bytes as BlobPart]), filename);
    return this.request("POST", "/album/upload", { form });
  }

  register(username: string, password: string): Promise<TokenResponse> {
    return this.request("POST", "/auth/register",
                        { json: { username, password } });
  }

  login(username: string, password: string): Promise<TokenResponse> {
    return this.request("POST", "/auth/login",
                        { json: { username, password } });
  }

  /** Raw bytes of an image the service already told us about. */
  async fetchBytes(uri: string): Promise<Uint8Array> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.resolveUri(uri));
    } catch (err) {
      throw new ApiError(0, "network", `cannot fetch image: ${err}`);
    }
    if (!response.ok) {
      throw new ApiError(response.status, "unknown_item",
                         `image fetch failed for ${uri}`);
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}
