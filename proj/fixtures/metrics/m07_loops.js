function walk(xs) {
  let total = 0;
  for (let i = 0; i < xs.length; i++) {
    total += xs[i];
  }
  let j = 0;
  while (j < 3) {
    j++;
  }
  do {
    j--;
  } while (j > 0);
  for (const x of xs) {
    total += x;
  }
  return total;
}
