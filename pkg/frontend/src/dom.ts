/** Tiny element builder bound to a document, so the app never touches
 * globals and runs unchanged under a synthetic DOM in tests. */

export interface ElOptions {
  className?: string;
  text?: string;
  title?: string;
  hidden?: boolean;
  attrs?: Record<string, string>;
}

export type El = <K extends keyof HTMLElementTagNameMap>(
  tag: K,
  options?: ElOptions,
  ...children: (HTMLElement | string)[]
) => HTMLElementTagNameMap[K];

export function makeEl(doc: Document): El {
  return (tag, options = {}, ...children) => {
    const node = doc.createElement(tag);
    if (options.className) node.className = options.className;
    if (options.text !== undefined) node.textContent = options.text;
    if (options.title !== undefined) node.title = options.title;
    if (options.hidden) node.hidden = true;
    for (const [name, value] of Object.entries(options.attrs ?? {})) {
      node.setAttribute(name, value);
    }
    for (const child of children) {
      node.append(typeof child === "string" ? doc.createTextNode(child) : child);
    }
    return node;
  };
}
