/**
 * Word-level diff between the draft and the refined report: the one piece
 * of domain computation the client is allowed to do. Classic LCS over
 * whitespace tokens; adjacent operations of the same kind are merged.
 */

export type DiffKind = "same" | "added" | "removed";

export interface DiffOp {
  kind: DiffKind;
  text: string;
}

function tokens(text: string): string[] {
  return text.split(/\s+/).filter((t) => t.length > 0);
}

export function wordDiff(oldText: string, newText: string): DiffOp[] {
  const a = tokens(oldText);
  const b = tokens(newText);
  // lcs[i][j] = LCS length of a[i:], b[j:]
  const lcs: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      lcs[i]![j] =
        a[i] === b[j]
          ? lcs[i + 1]![j + 1]! + 1
          : Math.max(lcs[i + 1]![j]!, lcs[i]![j + 1]!);
    }
  }
  const ops: DiffOp[] = [];
  const push = (kind: DiffKind, word: string) => {
    const last = ops[ops.length - 1];
    if (last && last.kind === kind) {
      last.text += ` ${word}`;
    } else {
      ops.push({ kind, text: word });
    }
  };
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      push("same", a[i]!);
      i++;
      j++;
    } else if (lcs[i + 1]![j]! >= lcs[i]![j + 1]!) {
      push("removed", a[i]!);
      i++;
    } else {
      push("added", b[j]!);
      j++;
    }
  }
  for (; i < a.length; i++) push("removed", a[i]!);
  for (; j < b.length; j++) push("added", b[j]!);
  return ops;
}
