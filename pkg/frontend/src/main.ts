/**
 * Browser entry point: renders the annotation screen off a {@link Session}
 * and forwards DOM events to it. All behaviour lives in `state.ts`; this file
 * only draws and re-draws.
 *
 * The annotator is chosen with the `?annotator=` query parameter; without it
 * the page lists the campaign's annotators to pick from.
 */

import { ApiClient, Violation } from "./api.js";
import { Draft, Session } from "./state.js";

const client = new ApiClient("");

const TEXT_FIELDS: ReadonlyArray<keyof Draft> = [
  "found_url",
  "license_spdx_or_name",
  "notes",
];

function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function appRoot(): HTMLElement {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  return root;
}

async function pickAnnotator(): Promise<void> {
  const campaign = await client.campaign();
  const root = appRoot();
  root.replaceChildren(
    el("h1", {}, `campaign ${campaign.campaign_id}`),
    el("p", {}, "pick your annotator id:"),
    el(
      "ul",
      { class: "annotators" },
      ...campaign.annotators.map((a) =>
        el("li", {}, el("a", { href: `?annotator=${encodeURIComponent(a)}` }, a)),
      ),
    ),
  );
}

function statusMark(status: string): string {
  if (status === "DONE") {
    return "✓";
  }
  if (status === "SKIPPED") {
    return "−";
  }
  return "·";
}

function violationList(violations: Violation[]): HTMLElement {
  return el(
    "ul",
    { class: "violations" },
    ...violations.map((v) =>
      el(
        "li",
        {},
        el("code", {}, `${v.field} [${v.rule}]`),
        ` ${v.message}`,
      ),
    ),
  );
}

function queuePane(session: Session, rerender: () => void): HTMLElement {
  const items = session.items.map((item, index) => {
    const row = el(
      "li",
      { class: index === session.currentIndex ? "current" : "" },
      `${statusMark(item.status)} ${item.mentionId}  ${item.softwareRaw}`,
    );
    row.addEventListener("click", () => {
      void session.select(index).then(rerender);
    });
    return row;
  });
  return el("ol", { class: "queue" }, ...items);
}

function codeButtons(
  session: Session,
  layerName: keyof Draft,
  rerender: () => void,
): HTMLElement {
  const group = el("div", { class: "choices" });
  const disabled = session.isDisabled(layerName);
  session.codesFor(layerName).forEach((code, position) => {
    const selected = session.draft[layerName] === code.code;
    const button = el(
      "button",
      {
        type: "button",
        class: selected ? "selected" : "",
        title: code.definition,
        ...(disabled ? { disabled: "disabled" } : {}),
      },
      `${position + 1} ${code.code}`,
      code.order === null ? "" : el("sup", {}, String(code.order)),
    );
    button.addEventListener("click", () => {
      session.setField(layerName, selected ? null : code.code);
      rerender();
    });
    group.append(button);
  });
  return group;
}

function boolButtons(
  session: Session,
  layerName: "is_preprint" | "is_software_paper",
  rerender: () => void,
): HTMLElement {
  const group = el("div", { class: "choices" });
  for (const [label, value] of [
    ["yes", true],
    ["no", false],
  ] as const) {
    const selected = session.draft[layerName] === value;
    const button = el(
      "button",
      { type: "button", class: selected ? "selected" : "" },
      label,
    );
    button.addEventListener("click", () => {
      session.setField(layerName, selected ? null : value);
      rerender();
    });
    group.append(button);
  }
  return group;
}

function textInput(
  session: Session,
  field: keyof Draft,
  rerender: () => void,
): HTMLElement {
  const input = el("input", {
    type: "text",
    value: String(session.draft[field] ?? ""),
    ...(session.isDisabled(field) ? { disabled: "disabled" } : {}),
  }) as HTMLInputElement;
  input.addEventListener("change", () => {
    session.setField(field, input.value === "" ? null : input.value);
    rerender();
  });
  return input;
}

function confidenceButtons(session: Session, rerender: () => void): HTMLElement {
  const group = el("div", { class: "choices" });
  for (let value = session.confidenceMin; value <= session.confidenceMax; value += 1) {
    const selected = session.draft.confidence === value;
    const button = el(
      "button",
      { type: "button", class: selected ? "selected" : "" },
      String(value),
    );
    button.addEventListener("click", () => {
      session.setField("confidence", selected ? null : value);
      rerender();
    });
    group.append(button);
  }
  return group;
}

function controlRow(
  session: Session,
  name: string,
  control: HTMLElement,
): HTMLElement {
  const focused = session.focusedControl() === name;
  return el(
    "div",
    { class: `control${focused ? " focused" : ""}` },
    el("label", {}, name.replace(/_/g, " ")),
    control,
  );
}

function detailPane(session: Session, rerender: () => void): HTMLElement {
  const detail = session.detail;
  const item = session.currentItem;
  if (!detail || !item) {
    return el("p", {}, "nothing selected");
  }
  const header = el(
    "div",
    { class: "mention-head" },
    el("h2", {}, detail.software_raw),
    el(
      "p",
      { class: "meta" },
      `${detail.mention_id} · ${detail.source_dataset} · ` +
        `${detail.pub_id}${detail.pub_year !== null ? ` (${detail.pub_year})` : ""} · ` +
        `${item.status} v${item.version}`,
    ),
    detail.pub_title ? el("p", { class: "title" }, detail.pub_title) : "",
    el(
      "p",
      { class: "links" },
      ...detail.pub_urls.map((url) =>
        el("a", { href: url, target: "_blank", rel: "noreferrer" }, url),
      ),
    ),
    el("pre", { class: "context" }, detail.context ?? "(no context)"),
  );

  const controls = el("div", { class: "controls" });
  for (const layer of session.campaign?.layers ?? []) {
    const name = layer.name as keyof Draft;
    if (layer.kind === "code") {
      controls.append(
        controlRow(session, layer.name, codeButtons(session, name, rerender)),
      );
    } else if (layer.kind === "bool") {
      controls.append(
        controlRow(
          session,
          layer.name,
          boolButtons(session, layer.name as "is_preprint", rerender),
        ),
      );
    } else {
      controls.append(
        controlRow(session, layer.name, textInput(session, name, rerender)),
      );
    }
  }
  controls.append(
    controlRow(session, "confidence", confidenceButtons(session, rerender)),
    controlRow(session, "notes", textInput(session, "notes", rerender)),
  );

  const submit = el("button", { type: "button", class: "submit" }, "submit (Enter)");
  submit.addEventListener("click", () => {
    void session.submit().then(rerender);
  });
  const skip = el("button", { type: "button" }, "skip (s)");
  skip.addEventListener("click", () => {
    void session.skip().then(rerender);
  });
  const reopen = el("button", { type: "button" }, "reopen (r)");
  reopen.addEventListener("click", () => {
    void session.reopen().then(rerender);
  });

  const notices = el("div", { class: "notices" });
  if (session.gateMessage) {
    notices.append(el("p", { class: "gate" }, session.gateMessage));
  }
  if (session.violations.length > 0) {
    notices.append(
      el("p", { class: "rejected" }, "the server rejected this annotation:"),
      violationList(session.violations),
    );
  }
  for (const warning of session.warnings) {
    notices.append(el("p", { class: "warning" }, warning));
  }

  return el(
    "div",
    { class: "detail" },
    header,
    controls,
    el("div", { class: "actions" }, submit, skip, reopen),
    notices,
  );
}

function render(session: Session): void {
  const rerender = (): void => render(session);
  const progress = session.progress();
  appRoot().replaceChildren(
    el(
      "header",
      {},
      el("h1", {}, `campaign ${session.campaign?.campaign_id ?? ""}`),
      el(
        "p",
        { class: "progress" },
        `${session.annotatorId}: ${progress.done} done, ` +
          `${progress.skipped} skipped, ${progress.pending} pending ` +
          `of ${progress.total}`,
      ),
      el("a", { href: client.exportUrl(session.annotatorId) }, "download my sheet"),
    ),
    el(
      "main",
      {},
      el("nav", {}, queuePane(session, rerender)),
      detailPane(session, rerender),
    ),
  );
}

function isTypingTarget(target: EventTarget | null): boolean {
  return (
    target instanceof HTMLInputElement || target instanceof HTMLTextAreaElement
  );
}

async function run(): Promise<void> {
  const annotator = new URLSearchParams(location.search).get("annotator");
  if (!annotator) {
    await pickAnnotator();
    return;
  }
  const session = new Session(client, annotator);
  await session.load();
  render(session);
  window.addEventListener("keydown", (event) => {
    if (isTypingTarget(event.target)) {
      if (event.key === "Escape" && event.target instanceof HTMLElement) {
        event.target.blur();
      }
      return;
    }
    void session.handleKey(event.key).then((handled) => {
      if (handled) {
        event.preventDefault();
      }
      render(session);
    });
  });
}

void run().catch((error) => {
  appRoot().replaceChildren(el("p", { class: "error" }, String(error)));
});
