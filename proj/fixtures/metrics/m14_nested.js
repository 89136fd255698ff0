function report(items) {
  const out = [];
  for (const item of items) {
    if (item.active && item.depth > 2) {
      out.push(`${item.name}: ${item.depth}`);
    } else {
      out.push(item.name);
    }
  }
  try {
    send(out);
  } catch (err) {
    console.error(err);
  } finally {
    cleanup();
  }
  return out;
}
