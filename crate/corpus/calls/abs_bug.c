int abs_value(int v) {
    if (v < 0)
        return -v;
    return v;
}

int main() {
    int x = *;
    int r = abs_value(x);
    assert(r >= 0);
}
