/**
 * Typed client for the campaign annotation HTTP API.
 *
 * Every request goes through an injectable `fetch`-shaped function so the
 * client can be exercised against an in-memory fake in tests and against the
 * real server in the browser. The client never interprets tagsets or layer
 * rules itself; it only moves JSON across the wire. Validation rejections
 * (HTTP 422) are returned as data rather than thrown, because a rejected
 * annotation is a normal part of the annotating workflow, not an exceptional
 * program state.
 */

/** One code of a closed tagset, as served by `GET /api/tagsets`. */
export interface TagCode {
  code: string;
  label: string;
  definition: string;
  /** Quality rank where the tagset is ordered (1 = best), else null. */
  order: number | null;
}

/** A named closed tagset. */
export interface Tagset {
  name: string;
  codes: TagCode[];
}

/** Response of `GET /api/tagsets`: all tagsets plus the confidence scale. */
export interface TagsetsResponse {
  tagsets: Tagset[];
  confidence_min: number;
  confidence_max: number;
}

/** One annotation layer of the campaign. */
export interface LayerInfo {
  name: string;
  /** "code" (closed tagset), "text" (free text) or "bool" (yes/no). */
  kind: string;
  /** Tagset name for "code" layers, else null. */
  tagset: string | null;
}

/** Response of `GET /api/campaign`. */
export interface CampaignInfo {
  campaign_id: string;
  annotators: string[];
  layers: LayerInfo[];
  sample_size: number;
  sample_meta: Record<string, unknown>;
}

/** One row of `GET /api/mentions`. */
export interface MentionSummary {
  mention_id: string;
  software_raw: string;
  pub_id: string;
  pub_year: number | null;
  /** Slot status for the requested annotator (PENDING/DONE/SKIPPED), if any. */
  status: string | null;
  version: number | null;
}

/** Response of `GET /api/mentions`. */
export interface MentionList {
  mentions: MentionSummary[];
  total: number;
}

/**
 * The full annotation record for one mention slot, in wire form. Field names
 * and optionality mirror the server's payload model; the server is the sole
 * authority on codes and cross-field rules.
 */
export interface AnnotationPayload {
  retrieval_quality: string;
  mention_type: string | null;
  mention_quality: string | null;
  found_url: string | null;
  link_quality: string | null;
  license_spdx_or_name: string | null;
  license_category: string | null;
  is_preprint: boolean | null;
  is_software_paper: boolean | null;
  confidence: number;
  notes: string | null;
}

/** Response of `GET /api/mentions/{id}`. */
export interface MentionDetail {
  mention_id: string;
  software_raw: string;
  context: string | null;
  pub_id: string;
  pub_title: string | null;
  pub_year: number | null;
  pub_urls: string[];
  source_dataset: string;
  /** Slot status per annotator. */
  statuses: Record<string, string>;
  /** Slot version per annotator. */
  versions: Record<string, number>;
  /** Saved annotation of the requested annotator, if one exists. */
  annotation: AnnotationPayload | null;
}

/** One violated rule from a rejected submit. */
export interface Violation {
  field: string;
  rule: string;
  message: string;
}

/** Successful `PUT /api/annotations/...`: saved, possibly with advisories. */
export interface SubmitAccepted {
  ok: true;
  version: number;
  status: string;
  warnings: string[];
}

/** Rejected `PUT /api/annotations/...`: nothing stored. */
export interface SubmitRejected {
  ok: false;
  violations: Violation[];
}

export type SubmitResult = SubmitAccepted | SubmitRejected;

/** Response of skip/reopen endpoints. */
export interface VersionStatus {
  version: number;
  status: string;
}

/** Response of `GET /api/progress`. */
export interface Progress {
  per_annotator: Record<string, Record<string, number>>;
  sample_size: number;
  total_slots: number;
}

/** One row of `GET /api/review-queue`. */
export interface ReviewItem {
  mention_id: string;
  annotator_id: string;
  confidence: number;
  warnings: string[];
}

/** Minimal fetch shape the client needs; injectable for tests. */
export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** A non-422 HTTP failure (or a transport failure, with status 0). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** True when the 422 body carries the server's structured violation list. */
interface ViolationDetail {
  violations: Violation[];
}

function isViolationDetail(detail: unknown): detail is ViolationDetail {
  return (
    typeof detail === "object" &&
    detail !== null &&
    Array.isArray((detail as { violations?: unknown }).violations)
  );
}

/**
 * Normalise a 422 body into violations. The server reports rule violations as
 * `{"detail": {"violations": [...]}}`; framework-level payload errors (missing
 * field, wrong type) arrive as the generic `{"detail": [{loc, msg, type}]}`
 * list and are mapped onto the same shape so the UI has one rejection path.
 */
function violationsFromDetail(detail: unknown): Violation[] {
  if (isViolationDetail(detail)) {
    return detail.violations;
  }
  if (Array.isArray(detail)) {
    return detail.map((entry) => {
      const item = entry as { loc?: unknown[]; msg?: string; type?: string };
      const loc = Array.isArray(item.loc) ? item.loc : [];
      const field = loc.length > 0 ? String(loc[loc.length - 1]) : "body";
      return {
        field,
        rule: item.type ?? "invalid",
        message: item.msg ?? "invalid value",
      };
    });
  }
  return [{ field: "body", rule: "invalid", message: String(detail) }];
}

/** Build a query string from defined parameters only. */
function query(params: Record<string, string | undefined>): string {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) {
      search.set(key, value);
    }
  }
  const encoded = search.toString();
  return encoded ? `?${encoded}` : "";
}

/** Typed access to every endpoint the annotation UI uses. */
export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (error) {
      throw new ApiError(0, `network failure: ${String(error)}`);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.request(path);
    if (!response.ok) {
      throw new ApiError(response.status, await describeFailure(response));
    }
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method: "POST" };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.request(path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await describeFailure(response));
    }
    return (await response.json()) as T;
  }

  /** `GET /api/campaign` */
  campaign(): Promise<CampaignInfo> {
    return this.getJson("/api/campaign");
  }

  /** `GET /api/tagsets` */
  tagsets(): Promise<TagsetsResponse> {
    return this.getJson("/api/tagsets");
  }

  /** `GET /api/mentions`, optionally filtered by annotator and status. */
  mentions(annotator?: string, status?: string): Promise<MentionList> {
    return this.getJson(`/api/mentions${query({ annotator, status })}`);
  }

  /** `GET /api/mentions/{id}` with the annotator's saved record, if any. */
  mention(mentionId: string, annotator?: string): Promise<MentionDetail> {
    const id = encodeURIComponent(mentionId);
    return this.getJson(`/api/mentions/${id}${query({ annotator })}`);
  }

  /**
   * `PUT /api/annotations/{mention}/{annotator}`. A 422 response is returned
   * as `{ok: false, violations}` instead of being thrown; any other failure
   * raises {@link ApiError}.
   */
  async submit(
    mentionId: string,
    annotatorId: string,
    payload: AnnotationPayload,
  ): Promise<SubmitResult> {
    const path =
      `/api/annotations/${encodeURIComponent(mentionId)}` +
      `/${encodeURIComponent(annotatorId)}`;
    const response = await this.request(path, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (response.status === 422) {
      const body = (await response.json()) as { detail?: unknown };
      return { ok: false, violations: violationsFromDetail(body.detail) };
    }
    if (!response.ok) {
      throw new ApiError(response.status, await describeFailure(response));
    }
    const accepted = (await response.json()) as {
      version: number;
      status: string;
      warnings: string[];
    };
    return { ok: true, ...accepted };
  }

  /** `POST /api/annotations/{mention}/{annotator}/skip` */
  skip(
    mentionId: string,
    annotatorId: string,
    note?: string,
  ): Promise<VersionStatus> {
    const path =
      `/api/annotations/${encodeURIComponent(mentionId)}` +
      `/${encodeURIComponent(annotatorId)}/skip`;
    return this.postJson(path, note === undefined ? undefined : { note });
  }

  /** `POST /api/annotations/{mention}/{annotator}/reopen` */
  reopen(mentionId: string, annotatorId: string): Promise<VersionStatus> {
    const path =
      `/api/annotations/${encodeURIComponent(mentionId)}` +
      `/${encodeURIComponent(annotatorId)}/reopen`;
    return this.postJson(path);
  }

  /** `GET /api/progress` */
  progress(): Promise<Progress> {
    return this.getJson("/api/progress");
  }

  /** `GET /api/review-queue` */
  reviewQueue(): Promise<{ items: ReviewItem[] }> {
    return this.getJson("/api/review-queue");
  }

  /** URL of the CSV export (campaign state, or one annotator's sheet). */
  exportUrl(annotator?: string): string {
    return `${this.baseUrl}/api/export${query({ annotator })}`;
  }
}

/** Extract the most useful error text from a failed response. */
async function describeFailure(response: Response): Promise<string> {
  let text = "";
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") {
      text = body.detail;
    } else if (body.detail !== undefined) {
      text = JSON.stringify(body.detail);
    }
  } catch {
    // Non-JSON body; fall through to the status line.
  }
  return text || `HTTP ${response.status}`;
}
