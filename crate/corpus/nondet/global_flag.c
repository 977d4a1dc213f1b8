unsigned int flag;

int main() {
    unsigned int n = *;
    while (n > 0) {
        if (n == 5)
            flag = 1;
        n--;
    }
    if (flag)
        __VERIFIER_error();
}
