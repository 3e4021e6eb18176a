// Keyboard shortcuts: Ctrl+z undo, Ctrl+y redo, Ctrl+r reset.

export interface HotkeyActions {
  undo(): void;
  redo(): void;
  reset(): void;
}

export function bindAnnotationHotkeys(target: EventTarget,
                                      actions: HotkeyActions): () => void {
  const handler = (event: Event) => {
    const e = event as KeyboardEvent;
    if (!e.ctrlKey || e.altKey || e.metaKey) return;
    const key = e.key.toLowerCase();
    if (key === 'z') {
      e.preventDefault();
      actions.undo();
    } else if (key === 'y') {
      e.preventDefault();
      actions.redo();
    } else if (key === 'r') {
      e.preventDefault();
      actions.reset();
    }
  };
  target.addEventListener('keydown', handler);
  return () => target.removeEventListener('keydown', handler);
}
