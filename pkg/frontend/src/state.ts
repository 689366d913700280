/**
 * Session state machine for the annotation screen.
 *
 * This module is deliberately DOM-free: it owns the work queue, the current
 * draft, the keyboard focus and every rule the UI enforces locally, and it is
 * driven entirely through method calls (`handleKey` for the keyboard path).
 * The browser layer in `main.ts` only renders this state and forwards events.
 *
 * Local rules are the minimum needed for a fluent keyboard flow:
 *
 * - not-software gating: while `mention_quality` is `NA`, the mention-level
 *   fields that must stay empty are cleared and locked (the publication-level
 *   booleans stay editable);
 * - submit gating: a draft can only be submitted once the two required
 *   fields, retrieval quality and confidence, are filled in.
 *
 * Everything else — code membership, cross-field rules, advisory warnings —
 * is left to the server, whose rejections are surfaced verbatim as
 * `{field, rule, message}` triples.
 *
 * Keyboard map (applies to the focused control unless noted):
 *
 *   ArrowDown / j     focus next control        ArrowUp / k   focus previous
 *   1..9              pick the n-th code; on booleans 1=yes 2=no; on the
 *                     confidence control the digit itself
 *   y / n             yes/no on booleans, Y/N codes where the tagset has them
 *   0 / Backspace     clear the focused control
 *   c                 jump to the confidence control
 *   Enter             submit, then advance to the next pending mention
 *   s                 skip the current mention, then advance
 *   r                 reopen the current mention
 *   ] / ArrowRight    next mention            [ / ArrowLeft   previous mention
 */

import {
  AnnotationPayload,
  ApiClient,
  CampaignInfo,
  LayerInfo,
  MentionDetail,
  SubmitResult,
  TagCode,
  Tagset,
  TagsetsResponse,
  Violation,
} from "./api.js";

/** Code for "retrieved passage is not about software" in MentionQuality. */
export const NOT_SOFTWARE_CODE = "NA";

/**
 * Fields that must stay empty while the mention is coded not-software.
 * Mirrors the server's exclusivity rule: only retrieval quality, confidence
 * and the publication-level booleans survive an NA coding.
 */
export const EXCLUDED_WHEN_NA = [
  "mention_type",
  "found_url",
  "link_quality",
  "license_spdx_or_name",
  "license_category",
] as const;

/** An editable annotation; `null` marks a field not filled in yet. */
export interface Draft {
  retrieval_quality: string | null;
  mention_type: string | null;
  mention_quality: string | null;
  found_url: string | null;
  link_quality: string | null;
  license_spdx_or_name: string | null;
  license_category: string | null;
  is_preprint: boolean | null;
  is_software_paper: boolean | null;
  confidence: number | null;
  notes: string | null;
}

export function emptyDraft(): Draft {
  return {
    retrieval_quality: null,
    mention_type: null,
    mention_quality: null,
    found_url: null,
    link_quality: null,
    license_spdx_or_name: null,
    license_category: null,
    is_preprint: null,
    is_software_paper: null,
    confidence: null,
    notes: null,
  };
}

/** Copy a stored annotation into an editable draft. */
export function draftFromAnnotation(annotation: AnnotationPayload): Draft {
  return {
    retrieval_quality: annotation.retrieval_quality,
    mention_type: annotation.mention_type,
    mention_quality: annotation.mention_quality,
    found_url: annotation.found_url,
    link_quality: annotation.link_quality,
    license_spdx_or_name: annotation.license_spdx_or_name,
    license_category: annotation.license_category,
    is_preprint: annotation.is_preprint,
    is_software_paper: annotation.is_software_paper,
    confidence: annotation.confidence,
    notes: annotation.notes,
  };
}

/** One mention slot of the campaign as the annotator sees it. */
export interface WorkItem {
  mentionId: string;
  softwareRaw: string;
  pubId: string;
  pubYear: number | null;
  status: string;
  version: number;
}

/** Live progress over the loaded work queue. */
export interface ProgressCounts {
  pending: number;
  done: number;
  skipped: number;
  total: number;
}

const BOOL_DIGITS: Record<number, boolean> = { 1: true, 2: false };

/** The session of one annotator working through one campaign. */
export class Session {
  campaign: CampaignInfo | null = null;
  confidenceMin = 1;
  confidenceMax = 5;
  items: WorkItem[] = [];
  currentIndex = -1;
  detail: MentionDetail | null = null;
  draft: Draft = emptyDraft();
  /** Index into {@link controlNames} of the keyboard-focused control. */
  focusIndex = 0;
  /** Violations from the last rejected submit; cleared on accept/navigation. */
  violations: Violation[] = [];
  /** Advisory warnings from the last accepted submit. */
  warnings: string[] = [];
  /** Why the last Enter was refused locally (missing required field). */
  gateMessage: string | null = null;

  private tagsetsByName = new Map<string, Tagset>();
  private layersByName = new Map<string, LayerInfo>();
  private controls: string[] = [];

  constructor(
    readonly client: ApiClient,
    readonly annotatorId: string,
  ) {}

  /** Fetch campaign, tagsets and the work queue; select the first pending. */
  async load(): Promise<void> {
    const [campaign, tagsets, mentions] = await Promise.all([
      this.client.campaign(),
      this.client.tagsets(),
      this.client.mentions(this.annotatorId),
    ]);
    this.campaign = campaign;
    this.applyTagsets(tagsets);
    this.layersByName = new Map(campaign.layers.map((l) => [l.name, l]));
    this.controls = campaign.layers
      .filter((l) => l.kind !== "text")
      .map((l) => l.name)
      .concat(["confidence"]);
    this.items = mentions.mentions.map((m) => ({
      mentionId: m.mention_id,
      softwareRaw: m.software_raw,
      pubId: m.pub_id,
      pubYear: m.pub_year,
      status: m.status ?? "PENDING",
      version: m.version ?? 0,
    }));
    const first = this.nextPendingIndex(-1);
    await this.select(first >= 0 ? first : this.items.length > 0 ? 0 : -1);
  }

  private applyTagsets(response: TagsetsResponse): void {
    this.tagsetsByName = new Map(response.tagsets.map((t) => [t.name, t]));
    this.confidenceMin = response.confidence_min;
    this.confidenceMax = response.confidence_max;
  }

  /** The mention currently on screen, if any. */
  get currentItem(): WorkItem | null {
    return this.items[this.currentIndex] ?? null;
  }

  /** Names of the keyboard-cyclable controls (code/bool layers + confidence). */
  controlNames(): string[] {
    return this.controls.slice();
  }

  /** The keyboard-focused control name. */
  focusedControl(): string | null {
    return this.controls[this.focusIndex] ?? null;
  }

  /** Codes of the tagset behind a code layer, in display order. */
  codesFor(layerName: string): TagCode[] {
    const layer = this.layersByName.get(layerName);
    if (!layer || layer.kind !== "code" || layer.tagset === null) {
      return [];
    }
    return this.tagsetsByName.get(layer.tagset)?.codes ?? [];
  }

  /** Layer metadata by name (confidence is not a layer and returns null). */
  layerInfo(layerName: string): LayerInfo | null {
    return this.layersByName.get(layerName) ?? null;
  }

  /**
   * Fetch one mention and make it current. The draft is rebuilt from the
   * server's stored annotation (or empty), so navigating away abandons any
   * unsubmitted edits — the server is the only persistence layer.
   */
  async select(index: number): Promise<void> {
    this.violations = [];
    this.warnings = [];
    this.gateMessage = null;
    this.focusIndex = 0;
    if (index < 0 || index >= this.items.length) {
      this.currentIndex = -1;
      this.detail = null;
      this.draft = emptyDraft();
      return;
    }
    const item = this.items[index]!;
    const detail = await this.client.mention(item.mentionId, this.annotatorId);
    this.currentIndex = index;
    this.detail = detail;
    this.draft = detail.annotation
      ? draftFromAnnotation(detail.annotation)
      : emptyDraft();
    const status = detail.statuses[this.annotatorId];
    const version = detail.versions[this.annotatorId];
    if (status !== undefined) {
      item.status = status;
    }
    if (version !== undefined) {
      item.version = version;
    }
  }

  /** Re-fetch the current mention, discarding local edits. */
  async reload(): Promise<void> {
    await this.select(this.currentIndex);
  }

  /** True while the not-software coding locks this field. */
  isDisabled(field: keyof Draft): boolean {
    return (
      this.draft.mention_quality === NOT_SOFTWARE_CODE &&
      (EXCLUDED_WHEN_NA as readonly string[]).includes(field)
    );
  }

  /**
   * Change one draft field. Returns false (and changes nothing) when the
   * field is locked by the not-software rule. Setting `mention_quality` to
   * `NA` clears every locked field so the draft stays submittable as-is.
   */
  setField<K extends keyof Draft>(field: K, value: Draft[K]): boolean {
    if (this.isDisabled(field)) {
      return false;
    }
    this.draft[field] = value;
    if (field === "mention_quality") {
      if (value === NOT_SOFTWARE_CODE) {
        for (const excluded of EXCLUDED_WHEN_NA) {
          this.draft[excluded] = null;
        }
      }
    }
    return true;
  }

  /** True once the required fields (retrieval quality, confidence) are set. */
  canSubmit(): boolean {
    return this.draft.retrieval_quality !== null && this.draft.confidence !== null;
  }

  /** The wire payload for the current draft, or null while still gated. */
  payload(): AnnotationPayload | null {
    if (this.draft.retrieval_quality === null || this.draft.confidence === null) {
      return null;
    }
    return {
      retrieval_quality: this.draft.retrieval_quality,
      mention_type: this.draft.mention_type,
      mention_quality: this.draft.mention_quality,
      found_url: this.draft.found_url,
      link_quality: this.draft.link_quality,
      license_spdx_or_name: this.draft.license_spdx_or_name,
      license_category: this.draft.license_category,
      is_preprint: this.draft.is_preprint,
      is_software_paper: this.draft.is_software_paper,
      confidence: this.draft.confidence,
      notes: this.draft.notes,
    };
  }

  /**
   * Submit the draft. On acceptance the slot is marked done, advisory
   * warnings are kept for display and the session advances to the next
   * pending mention. On rejection the violations are surfaced and the draft
   * is left untouched for correction. Transport errors propagate as
   * `ApiError` with the draft intact, so a retry resubmits the same work.
   */
  async submit(): Promise<SubmitResult | null> {
    const item = this.currentItem;
    const payload = this.payload();
    if (!item || !payload) {
      this.gateMessage = this.describeGate();
      return null;
    }
    this.gateMessage = null;
    const result = await this.client.submit(
      item.mentionId,
      this.annotatorId,
      payload,
    );
    if (result.ok) {
      item.status = result.status;
      item.version = result.version;
      this.violations = [];
      await this.advance();
      // Set after advancing: the advisories refer to the just-saved record
      // and must survive the selection reset so the UI can show them.
      this.warnings = result.warnings;
    } else {
      this.violations = result.violations;
    }
    return result;
  }

  /** Skip the current mention and advance to the next pending one. */
  async skip(note?: string): Promise<void> {
    const item = this.currentItem;
    if (!item) {
      return;
    }
    const outcome = await this.client.skip(item.mentionId, this.annotatorId, note);
    item.status = outcome.status;
    item.version = outcome.version;
    await this.advance();
  }

  /** Reopen the current mention (done/skipped back to pending). */
  async reopen(): Promise<void> {
    const item = this.currentItem;
    if (!item) {
      return;
    }
    const outcome = await this.client.reopen(item.mentionId, this.annotatorId);
    item.status = outcome.status;
    item.version = outcome.version;
  }

  /** Index of the next pending item after `from` (wrapping), or -1. */
  nextPendingIndex(from: number): number {
    const n = this.items.length;
    for (let step = 1; step <= n; step += 1) {
      const index = (((from + step) % n) + n) % n;
      if (this.items[index]?.status === "PENDING") {
        return index;
      }
    }
    return -1;
  }

  /** Move to the next pending mention, or stay put when none is left. */
  private async advance(): Promise<void> {
    const next = this.nextPendingIndex(this.currentIndex);
    if (next >= 0) {
      await this.select(next);
    }
  }

  /** Progress over the loaded queue, by slot status. */
  progress(): ProgressCounts {
    const counts = { pending: 0, done: 0, skipped: 0, total: this.items.length };
    for (const item of this.items) {
      if (item.status === "DONE") {
        counts.done += 1;
      } else if (item.status === "SKIPPED") {
        counts.skipped += 1;
      } else {
        counts.pending += 1;
      }
    }
    return counts;
  }

  /** Move the keyboard focus by `delta`, skipping locked controls. */
  moveFocus(delta: number): void {
    const n = this.controls.length;
    if (n === 0) {
      return;
    }
    let index = this.focusIndex;
    for (let step = 0; step < n; step += 1) {
      index = (index + delta + n) % n;
      const name = this.controls[index]!;
      if (name === "confidence" || !this.isDisabled(name as keyof Draft)) {
        this.focusIndex = index;
        return;
      }
    }
  }

  /** Human-readable reason the submit gate is closed, or null. */
  describeGate(): string | null {
    const missing: string[] = [];
    if (this.draft.retrieval_quality === null) {
      missing.push("retrieval quality");
    }
    if (this.draft.confidence === null) {
      missing.push("confidence");
    }
    return missing.length > 0 ? `required before submit: ${missing.join(", ")}` : null;
  }

  /**
   * Apply one keystroke. Returns true when the key was consumed. All
   * annotating can be done through this method alone; see the module header
   * for the map.
   */
  async handleKey(key: string): Promise<boolean> {
    switch (key) {
      case "ArrowDown":
      case "j":
        this.moveFocus(1);
        return true;
      case "ArrowUp":
      case "k":
        this.moveFocus(-1);
        return true;
      case "ArrowRight":
      case "]":
        if (this.currentIndex + 1 < this.items.length) {
          await this.select(this.currentIndex + 1);
        }
        return true;
      case "ArrowLeft":
      case "[":
        if (this.currentIndex > 0) {
          await this.select(this.currentIndex - 1);
        }
        return true;
      case "c": {
        const index = this.controls.indexOf("confidence");
        if (index >= 0) {
          this.focusIndex = index;
        }
        return true;
      }
      case "Enter": {
        if (!this.canSubmit()) {
          this.gateMessage = this.describeGate();
          return false;
        }
        await this.submit();
        return true;
      }
      case "s":
        await this.skip();
        return true;
      case "r":
        await this.reopen();
        return true;
      case "0":
      case "Backspace":
        return this.clearFocused();
      case "y":
        return this.setFocusedYesNo(true);
      case "n":
        return this.setFocusedYesNo(false);
      default:
        if (/^[1-9]$/.test(key)) {
          return this.setFocusedByDigit(Number(key));
        }
        return false;
    }
  }

  private clearFocused(): boolean {
    const name = this.focusedControl();
    if (name === null) {
      return false;
    }
    if (name === "confidence") {
      this.draft.confidence = null;
      return true;
    }
    return this.setField(name as keyof Draft, null);
  }

  private setFocusedByDigit(digit: number): boolean {
    const name = this.focusedControl();
    if (name === null) {
      return false;
    }
    if (name === "confidence") {
      if (digit < this.confidenceMin || digit > this.confidenceMax) {
        return false;
      }
      return this.setField("confidence", digit);
    }
    const layer = this.layersByName.get(name);
    if (layer?.kind === "bool") {
      const value = BOOL_DIGITS[digit];
      if (value === undefined) {
        return false;
      }
      return this.setBool(name, value);
    }
    const codes = this.codesFor(name);
    const code = codes[digit - 1];
    if (code === undefined) {
      return false;
    }
    return this.setField(name as keyof Draft, code.code);
  }

  private setFocusedYesNo(value: boolean): boolean {
    const name = this.focusedControl();
    if (name === null) {
      return false;
    }
    const layer = this.layersByName.get(name);
    if (layer?.kind === "bool") {
      return this.setBool(name, value);
    }
    const wanted = value ? "Y" : "N";
    if (this.codesFor(name).some((c) => c.code === wanted)) {
      return this.setField(name as keyof Draft, wanted);
    }
    return false;
  }

  private setBool(name: string, value: boolean): boolean {
    if (name === "is_preprint") {
      return this.setField("is_preprint", value);
    }
    if (name === "is_software_paper") {
      return this.setField("is_software_paper", value);
    }
    return false;
  }
}
