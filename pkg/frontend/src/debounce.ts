/** Trailing-edge debounce: the wrapped call runs once the caller has been
 * quiet for `waitMs` (default 150 ms, tuned for keystroke-driven queries). */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 150,
): ((...args: A) => void) & { cancel: () => void } {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, waitMs);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
  };
  return wrapped;
}
