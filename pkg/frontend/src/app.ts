import { ApiClient, ApiError } from "./api";
import { encodeBase64 } from "./base64";
import { makeEl, type El } from "./dom";
import type { DescriptionHit, GalleryMode, ImageHit } from "./types";

export type View = "navigation" | "retrieval" | "conversation";

const VIEWS: View[] = ["navigation", "retrieval", "conversation"];
const MODES: GalleryMode[] = ["album", "boon", "google"];

const STORAGE_TOKEN = "crossmodal.token";
const STORAGE_USER = "crossmodal.username";
const STORAGE_SESSION = "crossmodal.session";

export interface StagedImage {
  uri: string;
  name: string;
  bytes: Uint8Array;
}

export interface ChatEntry {
  role: "user" | "assistant" | "note";
  text: string;
  attachments?: number;
}

type StorageLike = Pick<Storage, "getItem" | "setItem" | "removeItem">;

export interface AppOptions {
  root: HTMLElement;
  client: ApiClient;
  storage?: StorageLike;
  /** how many results a search asks for */
  resultCount?: number;
}

interface DragPayload {
  itemId: string;
  uri: string;
}

function basename(uri: string): string {
  const clean = uri.split("?")[0] ?? uri;
  return clean.split("/").filter(Boolean).pop() ?? "image";
}

function humanMessage(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status > 0 ? `${err.message} (${err.code})` : err.message;
  }
  return String(err);
}

const memoryStorage = (): StorageLike => {
  const bag = new Map<string, string>();
  return {
    getItem: (key) => bag.get(key) ?? null,
    setItem: (key, value) => void bag.set(key, value),
    removeItem: (key) => void bag.delete(key),
  };
};

/** The whole single-page UI: navigation, retrieval and conversation views
 * over the service's JSON API, with the mouse gestures that turn results
 * into new queries (double-click) or chat attachments (drag). */
export class App {
  readonly client: ApiClient;

  activeView: View = "navigation";
  mode: GalleryMode = "boon";
  transcript: ChatEntry[] = [];
  staged: StagedImage[] = [];
  sessionId: string | null = null;
  username: string | null = null;

  private readonly root: HTMLElement;
  private readonly storage: StorageLike;
  private readonly el: El;
  private readonly k: number;

  private dragged: DragPayload | null = null;
  private retrievalBusy = false;
  private galleryBusy = false;
  private chatQueue: Promise<void> = Promise.resolve();
  private readonly pending = new Set<Promise<unknown>>();

  // long-lived elements the handlers update in place
  private sections!: Record<View, HTMLElement>;
  private viewButtons!: Record<View, HTMLButtonElement>;
  private modeButtons!: Record<GalleryMode, HTMLButtonElement>;
  private galleryGrid!: HTMLElement;
  private googleHint!: HTMLElement;
  private albumTools!: HTMLElement;
  private uploadInput!: HTMLInputElement;
  private navError!: HTMLElement;
  private searchInput!: HTMLInputElement;
  private badge!: HTMLElement;
  private resultsBox!: HTMLElement;
  private retrievalError!: HTMLElement;
  private transcriptList!: HTMLElement;
  private stagedBox!: HTMLElement;
  private chatInput!: HTMLInputElement;
  private chatError!: HTMLElement;
  private authBox!: HTMLElement;

  constructor(options: AppOptions) {
    this.root = options.root;
    this.client = options.client;
    this.storage = options.storage ?? memoryStorage();
    this.k = options.resultCount ?? 12;
    this.el = makeEl(this.root.ownerDocument);

    this.client.token = this.storage.getItem(STORAGE_TOKEN);
    this.username = this.storage.getItem(STORAGE_USER);
    this.sessionId = this.storage.getItem(STORAGE_SESSION);

    this.build();
    this.setView("navigation");
    this.setMode(this.mode);
  }

  /** Resolves once no network work is in flight; used by tests. */
  async idle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  private track<T>(work: Promise<T>): Promise<T> {
    this.pending.add(work);
    const done = () => this.pending.delete(work);
    work.then(done, done);
    return work;
  }

  // --- layout ---------------------------------------------------------------

  private build(): void {
    const el = this.el;
    this.root.textContent = "";

    this.viewButtons = {} as Record<View, HTMLButtonElement>;
    const switcher = el("nav", { className: "view-switch" });
    for (const view of VIEWS) {
      const button = el("button", {
        className: `view-tab view-tab-${view}`,
        text: view[0]!.toUpperCase() + view.slice(1),
        attrs: { type: "button", "data-view": view },
      });
      button.addEventListener("click", () => this.setView(view));
      // dragging a result onto the Conversation tab stages it for chat
      if (view === "conversation") {
        button.addEventListener("dragover", (event) => event.preventDefault());
        button.addEventListener("drop", (event) => {
          event.preventDefault();
          this.acceptDrop();
        });
      }
      this.viewButtons[view] = button;
      switcher.append(button);
    }

    this.authBox = el("div", { className: "auth-bar" });
    this.renderAuth();

    const header = el("header", { className: "topbar" },
      el("h1", { text: "Crossmodal" }), switcher, this.authBox);

    this.sections = {
      navigation: this.buildNavigation(),
      retrieval: this.buildRetrieval(),
      conversation: this.buildConversation(),
    };
    this.root.append(header, this.sections.navigation,
                     this.sections.retrieval, this.sections.conversation);
  }

  private buildNavigation(): HTMLElement {
    const el = this.el;
    this.modeButtons = {} as Record<GalleryMode, HTMLButtonElement>;
    const control = el("div", {
      className: "mode-switch",
      attrs: { role: "group", "aria-label": "gallery mode" },
    });
    for (const mode of MODES) {
      const button = el("button", {
        className: "mode-option",
        text: mode,
        attrs: { type: "button", "data-mode": mode },
      });
      button.addEventListener("click", () => this.setMode(mode));
      this.modeButtons[mode] = button;
      control.append(button);
    }

    this.navError = el("p", { className: "inline-error nav-error", hidden: true });
    this.galleryGrid = el("div", { className: "gallery-grid" });
    this.googleHint = el("p", {
      className: "google-hint",
      text: "Web mode has no resident gallery; run a search instead.",
      hidden: true,
    });

    this.uploadInput = el("input", {
      className: "upload-input",
      attrs: { type: "file", accept: "image/png,image/jpeg" },
    });
    this.uploadInput.addEventListener("change", () => this.handleUpload());
    this.albumTools = el("div", { className: "album-tools", hidden: true },
      el("label", { text: "Add to album: " }, this.uploadInput));

    return el("section", { className: "view view-navigation" },
      control, this.navError, this.albumTools, this.googleHint,
      this.galleryGrid);
  }

  private buildRetrieval(): HTMLElement {
    const el = this.el;
    this.searchInput = el("input", {
      className: "search-input",
      attrs: {
        type: "text",
        placeholder: "Describe what you are looking for, in any language",
      },
    });
    const form = el("form", { className: "search-form" }, this.searchInput,
      el("button", { className: "search-submit", text: "Search",
                     attrs: { type: "submit" } }));
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitTextQuery(this.searchInput.value);
    });

    this.retrievalError = el("p", {
      className: "inline-error retrieval-error", hidden: true });
    this.badge = el("p", { className: "translation-badge", hidden: true });
    this.resultsBox = el("div", { className: "results" });

    return el("section", { className: "view view-retrieval" },
      form, this.retrievalError, this.badge, this.resultsBox);
  }

  private buildConversation(): HTMLElement {
    const el = this.el;
    this.chatError = el("p", { className: "inline-error chat-error",
                               hidden: true });
    this.transcriptList = el("ul", { className: "transcript" });
    this.stagedBox = el("div", { className: "staged" });
    this.chatInput = el("input", {
      className: "chat-input",
      attrs: { type: "text", placeholder: "Ask about your images" },
    });
    const form = el("form", { className: "chat-form" }, this.chatInput,
      el("button", { className: "chat-send", text: "Send",
                     attrs: { type: "submit" } }));
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.queueChatSend(this.chatInput.value);
    });

    const section = el("section", { className: "view view-conversation" },
      this.chatError, this.transcriptList, this.stagedBox, form);
    section.addEventListener("dragover", (event) => event.preventDefault());
    section.addEventListener("drop", (event) => {
      event.preventDefault();
      this.acceptDrop();
    });
    return section;
  }

  // --- view and mode state --------------------------------------------------

  setView(view: View): void {
    this.activeView = view;
    for (const name of VIEWS) {
      this.sections[name].hidden = name !== view;
      this.viewButtons[name].setAttribute(
        "aria-selected", name === view ? "true" : "false");
    }
  }

  setMode(mode: GalleryMode): void {
    this.mode = mode;
    for (const name of MODES) {
      this.modeButtons[name].setAttribute(
        "aria-pressed", name === mode ? "true" : "false");
    }
    this.albumTools.hidden = !(mode === "album" && this.client.token !== null);
    void this.refreshGallery();
  }

  // --- auth -----------------------------------------------------------------

  private renderAuth(): void {
    const el = this.el;
    this.authBox.textContent = "";
    if (this.client.token !== null) {
      const logout = el("button", { className: "logout", text: "Log out",
                                    attrs: { type: "button" } });
      logout.addEventListener("click", () => this.logout());
      this.authBox.append(
        el("span", { className: "auth-who", text: this.username ?? "" }),
        logout);
      return;
    }
    const user = el("input", { className: "auth-user",
                               attrs: { type: "text", placeholder: "user" } });
    const pass = el("input", { className: "auth-pass",
                               attrs: { type: "password", placeholder: "password" } });
    const login = el("button", { className: "login", text: "Log in",
                                 attrs: { type: "button" } });
    const register = el("button", { className: "register", text: "Register",
                                    attrs: { type: "button" } });
    login.addEventListener("click",
      () => void this.authenticate(user.value, pass.value, "login"));
    register.addEventListener("click",
      () => void this.authenticate(user.value, pass.value, "register"));
    this.authBox.append(user, pass, login, register);
  }

  private authenticate(username: string, password: string,
                       how: "login" | "register"): Promise<void> {
    return this.track((async () => {
      try {
        const granted = how === "login"
          ? await this.client.login(username, password)
          : await this.client.register(username, password);
        this.client.token = granted.token;
        this.username = granted.username;
        this.storage.setItem(STORAGE_TOKEN, granted.token);
        this.storage.setItem(STORAGE_USER, granted.username);
        this.hideError(this.navError);
        this.renderAuth();
        this.setMode(this.mode);
      } catch (err) {
        this.showError(this.navError, err);
      }
    })());
  }

  private logout(): void {
    this.client.token = null;
    this.username = null;
    this.sessionId = null;
    this.storage.removeItem(STORAGE_TOKEN);
    this.storage.removeItem(STORAGE_USER);
    this.storage.removeItem(STORAGE_SESSION);
    this.renderAuth();
    this.setMode(this.mode);
  }

  // --- navigation view ------------------------------------------------------

  refreshGallery(): Promise<void> {
    if (this.mode === "google") {
      this.googleHint.hidden = false;
      this.galleryGrid.textContent = "";
      return Promise.resolve();
    }
    this.googleHint.hidden = true;
    if (this.galleryBusy) return Promise.resolve();
    this.galleryBusy = true;
    return this.track((async () => {
      try {
        const page = await this.client.galleryItems(this.mode, 1, 60);
        this.hideError(this.navError);
        this.galleryGrid.textContent = "";
        for (const item of page.items) {
          this.galleryGrid.append(this.imageCard(item.item_id, item.uri));
        }
      } catch (err) {
        this.showError(this.navError, err);
      } finally {
        this.galleryBusy = false;
      }
    })());
  }

  private fileBytes(file: File): Promise<Uint8Array> {
    if (typeof file.arrayBuffer === "function") {
      return file.arrayBuffer().then((buffer) => new Uint8Array(buffer));
    }
    // older DOM implementations only expose files through FileReader
    const win = this.root.ownerDocument.defaultView;
    if (!win) return Promise.reject(new Error("document has no window"));
    return new Promise((resolve, reject) => {
      const reader = new win.FileReader();
      reader.onerror = () => reject(reader.error);
      reader.onload = () => resolve(new Uint8Array(reader.result as ArrayBuffer));
      reader.readAsArrayBuffer(file);
    });
  }

  private handleUpload(): void {
    const file = this.uploadInput.files?.[0];
    if (!file) return;
    void this.track((async () => {
      try {
        const bytes = await this.fileBytes(file);
        await this.client.albumUpload(bytes, file.name);
        this.uploadInput.value = "";
        await this.refreshGallery();
      } catch (err) {
        this.showError(this.navError, err);
      }
    })());
  }

  // --- retrieval view -------------------------------------------------------

  /** Text-to-image search; double-clicked descriptions re-enter here with
   * their text passed through verbatim. */
  submitTextQuery(text: string): Promise<void> {
    if (!text.trim() || this.retrievalBusy) return Promise.resolve();
    this.retrievalBusy = true;
    this.searchInput.value = text;
    return this.track((async () => {
      try {
        const response = await this.client.searchText(text, this.mode, this.k);
        this.hideError(this.retrievalError);
        this.renderBadge(response.query);
        this.renderImageHits(response.hits);
        this.setView("retrieval");
      } catch (err) {
        // the previous grid stays; the failure is reported alongside it
        this.showError(this.retrievalError, err);
      } finally {
        this.retrievalBusy = false;
      }
    })());
  }

  /** Image-to-text search from a double-clicked image. */
  imageQuery(itemId: string, uri: string): Promise<void> {
    if (this.retrievalBusy) return Promise.resolve();
    this.retrievalBusy = true;
    return this.track((async () => {
      try {
        const bytes = await this.client.fetchBytes(uri);
        const response = await this.client.searchImage(
          bytes, basename(uri), this.k);
        this.hideError(this.retrievalError);
        this.badge.hidden = true;
        this.renderDescriptionHits(response.hits);
        this.setView("retrieval");
      } catch (err) {
        this.showError(this.retrievalError, err);
      } finally {
        this.retrievalBusy = false;
      }
    })());
  }

  private renderBadge(query: { was_translated: boolean; was_summarized: boolean;
                               detected_lang: string; english_text: string;
                               token_count: number }): void {
    const notes: string[] = [];
    if (query.was_translated) {
      notes.push(`translated from ${query.detected_lang}: ${query.english_text}`);
    }
    if (query.was_summarized) {
      notes.push(`shortened to ${query.token_count} tokens`);
    }
    this.badge.hidden = notes.length === 0;
    this.badge.textContent = notes.join(" · ");
  }

  private renderImageHits(hits: ImageHit[]): void {
    const el = this.el;
    const ordered = [...hits].sort((a, b) => a.rank - b.rank);
    this.resultsBox.textContent = "";
    const grid = el("div", { className: "result-grid" });
    for (const hit of ordered) {
      const card = this.imageCard(hit.item_id, hit.uri);
      card.append(el("figcaption", {
        className: "result-meta",
        text: `#${hit.rank} · ${hit.score.toFixed(3)}`,
      }));
      grid.append(card);
    }
    this.resultsBox.append(grid);
  }

  private renderDescriptionHits(hits: DescriptionHit[]): void {
    const el = this.el;
    const ordered = [...hits].sort((a, b) => a.rank - b.rank);
    this.resultsBox.textContent = "";
    const list = el("ul", { className: "description-list" });
    for (const hit of ordered) {
      const text = el("span", { className: "description-text", text: hit.text,
                                title: "double-click to search with this text" });
      text.addEventListener("dblclick", () => {
        void this.submitTextQuery(hit.text);
      });
      const row = el("li", { className: "description-row" },
        this.imageCard(hit.image_id, hit.image_uri), text,
        el("span", { className: "result-meta",
                     text: `#${hit.rank} · ${hit.score.toFixed(3)}` }));
      list.append(row);
    }
    this.resultsBox.append(list);
  }

  /** An image that supports the two result gestures: double-click to turn
   * it into an image query, drag to hand it to the conversation view. */
  private imageCard(itemId: string, uri: string): HTMLElement {
    const image = this.el("img", {
      className: "result-image",
      attrs: {
        src: this.client.resolveUri(uri),
        alt: `image ${itemId}`,
        draggable: "true",
        "data-item-id": itemId,
        "data-uri": uri,
      },
    });
    image.addEventListener("dblclick", () => {
      void this.imageQuery(itemId, uri);
    });
    image.addEventListener("dragstart", (event) => {
      this.dragged = { itemId, uri };
      // a real browser carries the uri in the drag payload too
      event.dataTransfer?.setData("text/plain", uri);
    });
    return this.el("figure", { className: "image-card" }, image);
  }

  // --- conversation view ----------------------------------------------------

  private acceptDrop(): void {
    const payload = this.dragged;
    this.dragged = null;
    if (!payload) return;
    this.setView("conversation");
    void this.track((async () => {
      try {
        const bytes = await this.client.fetchBytes(payload.uri);
        this.staged.push({
          uri: payload.uri,
          name: basename(payload.uri),
          bytes,
        });
        this.hideError(this.chatError);
        this.renderStaged();
      } catch (err) {
        this.showError(this.chatError, err);
      }
    })());
  }

  unstage(index: number): void {
    this.staged.splice(index, 1);
    this.renderStaged();
  }

  private renderStaged(): void {
    const el = this.el;
    this.stagedBox.textContent = "";
    this.staged.forEach((image, index) => {
      const cancel = el("button", { className: "unstage", text: "×",
                                    attrs: { type: "button",
                                             "aria-label": `remove ${image.name}` } });
      cancel.addEventListener("click", () => this.unstage(index));
      this.stagedBox.append(el("span", { className: "staged-chip",
                                         text: image.name }, cancel));
    });
  }

  /** Sends run strictly in order even when the user types faster than the
   * service answers. */
  queueChatSend(text: string): void {
    if (!text.trim()) return;
    const attachments = this.staged.splice(0);
    this.renderStaged();
    this.chatInput.value = "";
    const send = this.chatQueue.then(
      () => this.performChatSend(text, attachments));
    this.chatQueue = send;
    void this.track(send);
  }

  private async performChatSend(text: string,
                                attachments: StagedImage[]): Promise<void> {
    try {
      const response = await this.client.chat(
        text, this.sessionId,
        attachments.map((image) => encodeBase64(image.bytes)));
      this.sessionId = response.session_id;
      this.storage.setItem(STORAGE_SESSION, response.session_id);
      this.hideError(this.chatError);
      this.transcript.push({ role: "user", text,
                             attachments: attachments.length });
      response.descriptions.forEach((description, index) => {
        this.transcript.push({ role: "note",
                               text: `image ${index + 1} seen as: ${description}` });
      });
      this.transcript.push({ role: "assistant", text: response.reply });
      this.renderTranscript();
    } catch (err) {
      // put the failed message and its images back so nothing is lost
      this.staged.unshift(...attachments);
      this.renderStaged();
      if (!this.chatInput.value) this.chatInput.value = text;
      this.showError(this.chatError, err);
    }
  }

  private renderTranscript(): void {
    const el = this.el;
    this.transcriptList.textContent = "";
    for (const entry of this.transcript) {
      const row = el("li", { className: `entry entry-${entry.role}`,
                             text: entry.text });
      if (entry.attachments) {
        row.append(el("span", { className: "attachment-count",
                                text: ` [${entry.attachments} image(s)]` }));
      }
      this.transcriptList.append(row);
    }
  }

  // --- shared chrome --------------------------------------------------------

  private showError(where: HTMLElement, err: unknown): void {
    where.textContent = humanMessage(err);
    where.hidden = false;
  }

  private hideError(where: HTMLElement): void {
    where.hidden = true;
    where.textContent = "";
  }
}

export function createApp(options: AppOptions): App {
  return new App(options);
}
