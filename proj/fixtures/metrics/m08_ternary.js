function classify(depth, label) {
  const tag = depth > 4 ? 'deep' : 'shallow';
  const name = label || 'unnamed';
  const alt = label ?? 'none';
  return tag + ':' + name + ':' + alt;
}
